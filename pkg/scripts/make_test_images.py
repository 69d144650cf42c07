"""Regenerate the bundled 256x256 test images.

The classic Lenna / Bust / Peppers files are not redistributable, so the
bench uses freely licensed stand-ins:

    lenna   -> skimage astronaut (public domain, NASA), head-and-shoulders crop
    bust    -> Kodak kodim23 (Kodak lossless suite, unrestricted use), left crop
    peppers -> skimage coffee (CC0), cup crop

Selection rule: a subject close to the original, and at least ~50 selectable
approximation coefficients under the default thresholds (the originals carry
77-151).  kodim23 is read from the sporco wheel's data directory; pass its
path as the first argument.

Requires scikit-image; it is not a runtime dependency.
"""

from pathlib import Path

import sys
import numpy as np
import skimage.data
from PIL import Image

OUT = Path(__file__).resolve().parents[1] / "src" / "dwtmark" / "data"


def square_256(arr, box=None):
    im = Image.fromarray(np.ascontiguousarray(arr[..., :3]))
    if box is not None:
        im = im.crop(box)
    w, h = im.size
    s = min(w, h)
    left, top = (w - s) // 2, (h - s) // 2
    im = im.crop((left, top, left + s, top + s))
    return im.resize((256, 256), Image.LANCZOS)


def main():
    kodim23 = np.asarray(Image.open(sys.argv[1]).convert("RGB"))
    images = {
        "lenna": square_256(skimage.data.astronaut(), box=(100, 0, 400, 300)),
        "bust": square_256(kodim23, box=(0, 128, 384, 512)),
        "peppers": square_256(skimage.data.coffee(), box=(150, 0, 450, 300)),
    }
    OUT.mkdir(parents=True, exist_ok=True)
    for name, im in images.items():
        im.save(OUT / f"{name}.png", optimize=False)
        print(OUT / f"{name}.png")


if __name__ == "__main__":
    main()

import inspect

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dwtmark.color import rgb_to_ycbcr
from dwtmark.dwt import forward_dwt2, inverse_dwt2
from dwtmark.watermark import (
    ChannelMode,
    EmbedParams,
    approximation_band,
    decode_bit,
    embed,
    extract,
    generate_watermark,
    quantize_coefficients,
    select_coefficients,
    select_for_extraction,
    sign_matrix,
    suggest_thresholds,
    verify,
)

DEFAULTS = EmbedParams()


def splitmix_bits(key, n):
    """Pure-integer reference generator: MSB of each splitmix64 output."""
    m = (1 << 64) - 1
    out = []
    for i in range(1, n + 1):
        z = (key + i * 0x9E3779B97F4B7C15) & m
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & m
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & m
        z ^= z >> 31
        out.append(z >> 63)
    return out


@pytest.mark.parametrize("key", [0, 1, 42, 2**63, 2**64 - 1])
def test_generator_matches_integer_reference(key):
    assert generate_watermark(key, 4, 8).ravel().tolist() == splitmix_bits(key, 32)


def test_generator_is_deterministic():
    assert np.array_equal(generate_watermark(7, 32, 32), generate_watermark(7, 32, 32))


@pytest.mark.parametrize("key", [0, 1, 99, 123456789, 2**40 + 3])
def test_adjacent_keys_differ_about_half(key):
    a, b = generate_watermark(key, 32, 32), generate_watermark(key + 1, 32, 32)
    assert 0.40 <= np.mean(a != b) <= 0.60


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**64 - 1))
def test_ones_count_within_binomial_bound(key):
    w = generate_watermark(key, 32, 32)
    assert w.dtype == np.uint8 and set(np.unique(w)) <= {0, 1}
    assert 400 <= int(w.sum()) <= 624


@pytest.mark.parametrize("rows,cols", [(0, 4), (4, 0)])
def test_generator_rejects_empty(rows, cols):
    with pytest.raises(ValueError):
        generate_watermark(1, rows, cols)


def test_selection_is_strict():
    ll = np.array([[1500.0, 1550.0], [-1570.0, 1600.0]])
    assert select_coefficients(ll, 1500, 1600) == [(0, 1), (1, 0)]


def test_selection_of_zero_band_is_empty():
    assert select_coefficients(np.zeros((4, 4)), 1500, 1600) == []


def test_sign_matrix():
    assert sign_matrix(np.array([[0.0, -0.0, -3.0, 2.0]])).tolist() == [[1, 1, -1, 1]]


def test_quantization_examples():
    ll = np.array([[1550.0, -1510.0]])
    out = quantize_coefficients(ll, [(0, 0), (0, 1)], np.array([[0, 1]], dtype=np.uint8), DEFAULTS)
    assert out.tolist() == [[1520.0, -1580.0]]
    assert ll.tolist() == [[1550.0, -1510.0]]


def test_extraction_window_and_decoding():
    assert DEFAULTS.extract_range == (1510.0, 1590.0)
    assert DEFAULTS.midpoint == 1550.0
    ll = np.array([[1520.0, -1580.0, 1509.0, 1591.0, 1510.0, -1590.0]])
    assert select_for_extraction(ll, DEFAULTS) == [(0, 0), (0, 1), (0, 4), (0, 5)]
    assert decode_bit(1520.0, DEFAULTS) == 0
    assert decode_bit(-1580.0, DEFAULTS) == 1
    assert decode_bit(1550.0, DEFAULTS) == 1


def test_suggest_thresholds_percentages():
    ll = np.array([[10.0, -2000.0], [5.0, 7.0]])
    assert suggest_thresholds(ll) == pytest.approx((900.0, 1700.0))


@pytest.mark.parametrize("ll", [np.zeros((4, 4)), np.zeros((0, 0))])
def test_suggest_thresholds_rejects_degenerate(ll):
    with pytest.raises(ValueError):
        suggest_thresholds(ll)


def test_suggested_thresholds_bracket_defaults_on_lenna(lenna):
    t1, t2 = suggest_thresholds(approximation_band(lenna, DEFAULTS))
    assert t1 <= DEFAULTS.t1 < DEFAULTS.t2 <= t2
    assert t2 <= 1.3 * DEFAULTS.t2


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(t1=1600, t2=1500),
        dict(t1=0),
        dict(x1=10, x2=20),
        dict(x1=50),
        dict(x2=0),
        dict(key=-1),
        dict(key=2**64),
        dict(levels=0),
    ],
)
def test_params_validation(kwargs):
    with pytest.raises(ValueError):
        EmbedParams(**kwargs)


def test_params_levels():
    assert (DEFAULTS.zero_level, DEFAULTS.one_level) == (1520.0, 1580.0)


@pytest.mark.parametrize("text,mode", [("Y", ChannelMode.YCBCR_Y), ("rgb", ChannelMode.RGB_G), ("R", ChannelMode.RGB_R)])
def test_channel_mode_aliases(text, mode):
    assert ChannelMode.parse(text) is mode


def test_channel_mode_rejects_unknown():
    with pytest.raises(ValueError):
        ChannelMode.parse("CMYK")


def test_extract_has_no_host_parameter():
    assert list(inspect.signature(extract).parameters) == ["img", "params", "fb"]


@pytest.mark.parametrize("mode", list(ChannelMode))
def test_no_attack_fidelity_all_images(images, mode):
    params = EmbedParams(key=42, channel_mode=mode)
    for name, host in images.items():
        marked, report = embed(host, params)
        if report.embedded_count == 0:
            continue
        scored = verify(extract(marked, params), params.key, report)
        assert scored.error_rate_percent == 0.0, name
        assert scored.nc == 1.0
        assert scored.score == 1.0
        assert scored.present == (report.embedded_count >= 16)
        assert report.positions == sorted(report.positions)


def test_embedding_is_deterministic(lenna):
    a, ra = embed(lenna, EmbedParams(key=5))
    b, rb = embed(lenna, EmbedParams(key=5))
    assert np.array_equal(a, b) and ra.positions == rb.positions


def test_sign_preservation_and_non_interference(lenna):
    params = EmbedParams(key=11)
    y = rgb_to_ycbcr(lenna).planes[0]
    pyr = forward_dwt2(y, 3)
    positions = select_coefficients(pyr.approx, params.t1, params.t2)
    bits = generate_watermark(params.key, *pyr.approx.shape)
    quantized = quantize_coefficients(pyr.approx, positions, bits, params)
    mod = pyr.copy()
    mod.approx = quantized
    after = forward_dwt2(inverse_dwt2(mod), 3)
    rows, cols = zip(*positions)
    assert np.array_equal(np.sign(after.approx[rows, cols]), np.sign(pyr.approx[rows, cols]))
    mask = np.ones(pyr.approx.shape, bool)
    mask[rows, cols] = False
    assert np.max(np.abs(after.approx[mask] - pyr.approx[mask])) < 1e-6
    for da, db in zip(after.details, pyr.details):
        for x, z in zip(da, db):
            assert np.max(np.abs(x - z)) < 1e-6


@settings(max_examples=25, deadline=None)
@given(
    st.floats(200, 1800),
    st.floats(150, 400),
    st.floats(0, 200),
    st.floats(0, 200),
)
def test_monotone_payload(t1, width, grow_low, grow_high):
    ll = np.random.default_rng(3).uniform(-2040, 2040, size=(32, 32))
    t1_wide = max(1.0, t1 - grow_low)
    narrow = len(select_coefficients(ll, t1, t1 + width))
    wide = len(select_coefficients(ll, t1_wide, t1 + width + grow_high))
    assert wide >= narrow


def test_monotone_payload_on_image(lenna):
    y = approximation_band(lenna, DEFAULTS)
    counts = [len(select_coefficients(y, 1500 - d, 1600 + d)) for d in (0, 50, 100, 200)]
    assert counts == sorted(counts)


def test_flat_gray_embeds_nothing_with_warning(caplog):
    gray = np.full((64, 64, 3), 128, np.uint8)
    marked, report = embed(gray, DEFAULTS)
    assert report.embedded_count == 0
    assert report.warning
    assert np.array_equal(marked, gray)
    assert any("0 bits" in r.getMessage() or "no coefficients" in r.getMessage() for r in caplog.records)


def test_embed_rejects_bad_dimensions():
    with pytest.raises(ValueError):
        embed(np.zeros((255, 256, 3), np.uint8), DEFAULTS)


def test_lenna_quality(lenna):
    _, report = embed(lenna, EmbedParams(key=42))
    assert report.psnr >= 40 and report.corr > 0.999
    # Reference count for the original host is 151; the stand-in differs.
    assert 50 <= report.embedded_count <= 400


def test_wrong_key_scores_near_half(lenna):
    marked, report = embed(lenna, EmbedParams(key=1))
    ext = extract(marked, EmbedParams(key=2))
    assert ext.extracted_count >= 64
    scored = verify(ext, 2)
    assert 0.3 <= scored.score <= 0.7 and not scored.present


def test_verify_counts_errors(lenna):
    params = EmbedParams(key=9)
    marked, report = embed(lenna, params)
    ext = extract(marked, params)
    flipped = dict(ext.recovered)
    for pos in report.positions[:3]:
        flipped[pos] ^= 1
    ext.recovered = flipped
    scored = verify(ext, params.key, report)
    assert scored.correctly_recovered == report.embedded_count - 3
    assert scored.error_rate_percent == pytest.approx(300 / report.embedded_count)
    assert 0 <= scored.nc <= 1


def test_bit_matrix_marks_unrecovered(lenna):
    params = EmbedParams(key=4)
    marked, _ = embed(lenna, params)
    ext = extract(marked, params)
    m = ext.bit_matrix()
    assert m.shape == ext.shape
    assert all(m[p] == b for p, b in ext.recovered.items())
    assert int(m.sum()) == sum(ext.recovered.values())


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([ChannelMode.YCBCR_Y, ChannelMode.RGB_G]))
def test_fidelity_survives_clipping(seed, mode):
    # Flat blocks at 0 and 255 next to in-range levels make the inverse
    # transform overshoot, so clipping drags coefficients off their levels.
    r = np.random.default_rng(seed)
    img = np.kron(r.choice([0, 120, 190, 200, 255], size=(4, 4, 3)), np.ones((16, 16, 1))).astype(np.uint8)
    params = EmbedParams(key=seed, channel_mode=mode)
    marked, report = embed(img, params)
    if report.embedded_count:
        assert verify(extract(marked, params), seed, report).error_rate_percent == 0.0

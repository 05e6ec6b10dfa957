# Copyright 2026 The ABPN Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# ==============================================================================

import numpy as np
import pytest

import abpn


def _image(h, w, seed=0):
    return np.random.default_rng(seed).integers(0, 256, (h, w, 3), dtype=np.uint8)


def test_param_count_and_variants():
    assert abpn.param_count() == 43035
    assert abpn.variants() == ["baseline", "nearest", "bilinear", "fsrl", "abrl"]
    for v in abpn.variants():
        assert abpn.build(variant=v).param_count == 43035


def test_upscale_shape_and_determinism():
    model = abpn.build(seed=1)
    img = _image(10, 12)
    out = model.upscale(img)
    assert out.shape == (30, 36, 3) and out.dtype == np.uint8
    assert np.array_equal(out, model.upscale(img))
    y = model.forward(img[None].astype(np.float32))
    assert y.shape == (1, 30, 36, 3)
    assert y.min() >= 0.0 and y.max() <= 255.0


def test_quantized_round_trip(tmp_path):
    model = abpn.build(channels=8, pairs=2, seed=2)
    q = abpn.quantize(model, [_image(16, 16, s) for s in range(3)])
    assert q.activation_scales["input"] == (1.0, 0)
    img = _image(9, 7, 5)
    out = q.upscale(img)
    assert out.shape == (27, 21, 3)
    path = tmp_path / "q.abpn"
    q.save(path)
    loaded = abpn.load(path)
    assert isinstance(loaded, abpn.QuantizedModel)
    assert loaded.to_bytes() == q.to_bytes()
    assert np.array_equal(loaded.upscale(img), out)
    # Float model file round trip.
    model.save(tmp_path / "f.abpn")
    assert abpn.load(tmp_path / "f.abpn").to_bytes() == model.to_bytes()


def test_psnr_and_png(tmp_path):
    img = _image(6, 5)
    assert abpn.psnr(img, img) == float("inf")
    path = tmp_path / "x.png"
    abpn.write_png(path, img)
    assert np.array_equal(abpn.read_png(path), img)
    up = abpn.nearest_upsample(img, 2)
    assert np.array_equal(up, img.repeat(2, 0).repeat(2, 1))


def test_errors_are_typed(tmp_path):
    with pytest.raises(abpn.AbpnError, match="^io:"):
        abpn.load(tmp_path / "missing.abpn")
    (tmp_path / "bad.abpn").write_bytes(b"ABPN")
    with pytest.raises(abpn.AbpnError, match="^format:"):
        abpn.load(tmp_path / "bad.abpn")
    with pytest.raises(abpn.AbpnError):
        abpn.build(variant="nope")

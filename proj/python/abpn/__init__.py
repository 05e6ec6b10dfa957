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

"""ABPN super-resolution: float and int8 inference, model files, PSNR."""

from ._abpn import (
    AbpnError,
    FloatModel,
    QuantizedModel,
    build,
    load,
    nearest_upsample,
    param_count,
    psnr,
    quantize,
    read_png,
    variants,
    write_png,
)

__all__ = [
    "AbpnError",
    "FloatModel",
    "QuantizedModel",
    "build",
    "load",
    "nearest_upsample",
    "param_count",
    "psnr",
    "quantize",
    "read_png",
    "variants",
    "write_png",
]

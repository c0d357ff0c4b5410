// Copyright 2026 The qsplit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <vector>

namespace qsplit {

/// Real tensor stored row-major as (row, col, channel). Used for images
/// (values in [0, 1]) and for feature maps (values in [-1, 1]).
struct Tensor3 {
    std::size_t height = 0;
    std::size_t width = 0;
    std::size_t channels = 0;
    std::vector<double> values;

    Tensor3() = default;
    Tensor3(std::size_t h, std::size_t w, std::size_t c, double fill = 0.0)
        : height(h), width(w), channels(c), values(h * w * c, fill) {}

    std::size_t size() const { return values.size(); }
    std::size_t index(std::size_t row, std::size_t col, std::size_t ch) const {
        return (row * width + col) * channels + ch;
    }
    double &at(std::size_t row, std::size_t col, std::size_t ch = 0) { return values[index(row, col, ch)]; }
    double at(std::size_t row, std::size_t col, std::size_t ch = 0) const { return values[index(row, col, ch)]; }

    bool same_shape(const Tensor3 &o) const {
        return height == o.height && width == o.width && channels == o.channels;
    }
    friend bool operator==(const Tensor3 &, const Tensor3 &) = default;
};

using Image = Tensor3;
using FeatureMap = Tensor3;

}  // namespace qsplit

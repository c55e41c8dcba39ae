// Copyright 2026 The fsbconv Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <optional>
#include <set>
#include <string>

#include "fsbconv/model.hpp"

namespace fsbconv {

// Counting variants. "direct" and "wino3d" price a layer as the dense
// [N,C,K,R,S] convolution it declares (for fsb layers: the convolution the
// block replaces), "fsb_direct"/"fsb_hfa" price the decomposed stages.
enum class MultAlgo : int { direct = 0, wino3d = 1, fsb_direct = 2, fsb_hfa = 3 };

const char* mult_algo_name(MultAlgo a);

struct PlanExtents {
  int m1 = 2;  // temporal output tile, F(m1, K)
  int m2 = 2;  // spatial output tile, F(m2 x m2, R x R)
  int m = 2;   // 3D output tile, F(m^3, K^3)
};

/// Parameters the layer actually stores: conv3d -> N*C*K*R*S/groups,
/// fsb -> M*C*K + M*R*S + N*M, everything else 0.
std::int64_t param_count(const LayerSpec& layer);

/// Parameters of the dense equivalent (what an fsb layer replaces).
std::int64_t param_count_baseline(const LayerSpec& layer);

/// Multiplications for one batch item, exact integer arithmetic, padded tile
/// grids counted with ceil division. Throws UnsupportedError for combinations
/// that have no defined count (fsb variants on a non-fsb layer, Winograd on
/// strided or non-cubic kernels).
std::int64_t mult_count(const LayerSpec& layer, const Shape4& in_shape,
                        MultAlgo algo, const PlanExtents& plans);

struct LayerRow {
  int index = 0;
  LayerKind kind = LayerKind::conv3d;
  Shape4 in_shape, out_shape;
  std::int64_t params_base = 0;
  std::int64_t params_actual = 0;
  std::optional<double> rate;  // params_base / params_actual
  std::array<std::optional<std::int64_t>, 4> mults;  // indexed by MultAlgo
};

struct ComplexityReport {
  std::string model_name;
  Shape4 input;
  PlanExtents plans;
  std::vector<LayerRow> rows;
  std::int64_t total_params_base = 0;
  std::int64_t total_params_actual = 0;
  std::array<std::optional<std::int64_t>, 4> total_mults;
  // The same totals without the ceil-division tile rounding, for comparison
  // against the exact tiled counts above.
  std::array<std::optional<double>, 4> total_mults_asymptotic;
};

/// Per-layer and total parameter/multiplication accounting. Variants not in
/// `variants`, and variants undefined for a layer, leave empty cells.
ComplexityReport analyze_model(const ModelSpec& spec,
                               const std::set<MultAlgo>& variants,
                               const PlanExtents& plans);

std::string render_text(const ComplexityReport& rep);
std::string render_csv(const ComplexityReport& rep);

}  // namespace fsbconv

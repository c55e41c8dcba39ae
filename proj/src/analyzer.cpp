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

#include "fsbconv/analyzer.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace fsbconv {

namespace {

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

struct OutExtents {
  std::int64_t t, h, w;
};

OutExtents conv_out(const LayerSpec& l, const Shape4& in) {
  const auto pad = l.resolved_pad();
  const auto stride =
      l.kind == LayerKind::fsb ? std::array<std::int64_t, 3>{1, 1, 1} : l.stride;
  return {conv_out_extent(in.t, l.kernel[0], pad[0], stride[0]),
          conv_out_extent(in.h, l.kernel[1], pad[1], stride[1]),
          conv_out_extent(in.w, l.kernel[2], pad[2], stride[2])};
}

bool is_conv_like(LayerKind k) {
  return k == LayerKind::conv3d || k == LayerKind::fsb;
}

std::string shape_str(const Shape4& s) {
  std::ostringstream os;
  os << s.c << "x" << s.t << "x" << s.h << "x" << s.w;
  return os.str();
}

std::string opt_str(const std::optional<std::int64_t>& v) {
  return v ? std::to_string(*v) : std::string();
}

std::string rate_str(const std::optional<double>& r) {
  if (!r) return std::string();
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", *r);
  return buf;
}

// Asymptotic (no tile rounding) variant of mult_count, for the report footer.
double mult_count_asymptotic(const LayerSpec& l, const Shape4& in, MultAlgo algo,
                             const PlanExtents& p) {
  if (!is_conv_like(l.kind)) return 0.0;
  const OutExtents o = conv_out(l, in);
  const double voxels = double(o.t) * double(o.h) * double(o.w);
  const double K = double(l.kernel[0]), R = double(l.kernel[1]), S = double(l.kernel[2]);
  switch (algo) {
    case MultAlgo::direct:
      return double(l.out) * (double(l.in) / double(l.groups)) * K * R * S * voxels;
    case MultAlgo::wino3d: {
      const double n = double(p.m) + K - 1.0;
      return double(l.out) * double(l.in) * voxels * (n * n * n) /
             (double(p.m) * double(p.m) * double(p.m));
    }
    case MultAlgo::fsb_direct:
      return (double(l.fsb_m) * double(l.in) * K + double(l.fsb_m) * R * S +
              double(l.out) * double(l.fsb_m)) *
             voxels;
    case MultAlgo::fsb_hfa: {
      const double n1 = double(p.m1) + K - 1.0;
      const double n2 = double(p.m2) + R - 1.0;
      return double(l.fsb_m) * double(l.in) * voxels * n1 / double(p.m1) +
             double(l.fsb_m) * voxels * (n2 * n2) / (double(p.m2) * double(p.m2)) +
             double(l.out) * double(l.fsb_m) * voxels;
    }
  }
  return 0.0;
}

}  // namespace

const char* mult_algo_name(MultAlgo a) {
  switch (a) {
    case MultAlgo::direct: return "direct";
    case MultAlgo::wino3d: return "wino3d";
    case MultAlgo::fsb_direct: return "fsb";
    case MultAlgo::fsb_hfa: return "hfa";
  }
  return "?";
}

std::int64_t param_count(const LayerSpec& l) {
  switch (l.kind) {
    case LayerKind::conv3d:
      return l.out * (l.in / l.groups) * l.kernel[0] * l.kernel[1] * l.kernel[2];
    case LayerKind::fsb:
      return l.fsb_m * l.in * l.kernel[0] + l.fsb_m * l.kernel[1] * l.kernel[2] +
             l.out * l.fsb_m;
    default:
      return 0;
  }
}

std::int64_t param_count_baseline(const LayerSpec& l) {
  switch (l.kind) {
    case LayerKind::conv3d:
      return param_count(l);
    case LayerKind::fsb:
      return l.out * l.in * l.kernel[0] * l.kernel[1] * l.kernel[2];
    default:
      return 0;
  }
}

std::int64_t mult_count(const LayerSpec& l, const Shape4& in, MultAlgo algo,
                        const PlanExtents& p) {
  if (!is_conv_like(l.kind)) return 0;  // trg/pool/relu: additions and compares only

  const OutExtents o = conv_out(l, in);
  const std::int64_t voxels = o.t * o.h * o.w;
  const std::int64_t K = l.kernel[0], R = l.kernel[1], S = l.kernel[2];

  switch (algo) {
    case MultAlgo::direct:
      return l.out * (l.in / l.groups) * K * R * S * voxels;

    case MultAlgo::wino3d: {
      if (K != R || R != S)
        throw UnsupportedError("wino3d counts require cubic kernels");
      if (l.kind == LayerKind::conv3d &&
          l.stride != std::array<std::int64_t, 3>{1, 1, 1})
        throw UnsupportedError("wino3d counts require stride 1");
      const std::int64_t n = p.m + K - 1;
      return l.out * l.in * ceil_div(o.t, p.m) * ceil_div(o.h, p.m) *
             ceil_div(o.w, p.m) * n * n * n;
    }

    case MultAlgo::fsb_direct: {
      if (l.kind != LayerKind::fsb)
        throw UnsupportedError("fsb counts apply to fsb layers only");
      return (l.fsb_m * l.in * K + l.fsb_m * R * S + l.out * l.fsb_m) * voxels;
    }

    case MultAlgo::fsb_hfa: {
      if (l.kind != LayerKind::fsb)
        throw UnsupportedError("hfa counts apply to fsb layers only");
      const std::int64_t n1 = p.m1 + K - 1;
      const std::int64_t n2 = p.m2 + R - 1;
      // same-padded stages: T' = T, H' = H, W' = W
      return l.fsb_m * l.in * in.h * in.w * ceil_div(in.t, p.m1) * n1 +
             l.fsb_m * in.t * ceil_div(in.h, p.m2) * ceil_div(in.w, p.m2) * n2 * n2 +
             l.out * l.fsb_m * in.t * in.h * in.w;
    }
  }
  return 0;
}

ComplexityReport analyze_model(const ModelSpec& spec,
                               const std::set<MultAlgo>& variants,
                               const PlanExtents& plans) {
  ComplexityReport rep;
  rep.model_name = spec.name;
  rep.input = spec.input;
  rep.plans = plans;

  const std::vector<Shape4> shapes = propagate_shapes(spec);
  std::array<double, 4> asym_total{0, 0, 0, 0};
  std::array<bool, 4> any_cell{false, false, false, false};

  Shape4 in = spec.input;
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const LayerSpec& l = spec.layers[i];
    LayerRow row;
    row.index = int(i);
    row.kind = l.kind;
    row.in_shape = in;
    row.out_shape = shapes[i];
    row.params_base = param_count_baseline(l);
    row.params_actual = param_count(l);
    if (row.params_actual > 0)
      row.rate = double(row.params_base) / double(row.params_actual);

    for (MultAlgo a : variants) {
      const auto ai = std::size_t(a);
      try {
        row.mults[ai] = mult_count(l, in, a, plans);
        asym_total[ai] += mult_count_asymptotic(l, in, a, plans);
        any_cell[ai] = true;
      } catch (const UnsupportedError&) {
        // variant undefined for this layer: leave the cell empty
      }
    }

    rep.total_params_base += row.params_base;
    rep.total_params_actual += row.params_actual;
    rep.rows.push_back(row);
    in = shapes[i];
  }

  for (std::size_t ai = 0; ai < 4; ++ai) {
    if (!any_cell[ai]) continue;
    std::int64_t total = 0;
    for (const LayerRow& row : rep.rows)
      if (row.mults[ai]) total += *row.mults[ai];
    rep.total_mults[ai] = total;
    rep.total_mults_asymptotic[ai] = asym_total[ai];
  }
  return rep;
}

std::string render_csv(const ComplexityReport& rep) {
  std::ostringstream os;
  os << "layer,kind,in_shape,out_shape,params_base,params_fsb,rate,"
        "mults_direct,mults_wino3d,mults_fsb,mults_hfa\n";
  for (const LayerRow& r : rep.rows) {
    os << r.index << ',' << layer_kind_name(r.kind) << ',' << shape_str(r.in_shape)
       << ',' << shape_str(r.out_shape) << ',' << r.params_base << ','
       << r.params_actual << ',' << rate_str(r.rate);
    for (const auto& m : r.mults) os << ',' << opt_str(m);
    os << '\n';
  }
  std::optional<double> total_rate;
  if (rep.total_params_actual > 0)
    total_rate = double(rep.total_params_base) / double(rep.total_params_actual);
  os << "total,,,," << rep.total_params_base << ',' << rep.total_params_actual
     << ',' << rate_str(total_rate);
  for (const auto& m : rep.total_mults) os << ',' << opt_str(m);
  os << '\n';
  return os.str();
}

std::string render_text(const ComplexityReport& rep) {
  std::ostringstream os;
  os << "model: " << rep.model_name << "   input: " << shape_str(rep.input)
     << " (CxTxHxW)   plans: m1=" << rep.plans.m1 << " m2=" << rep.plans.m2
     << " m=" << rep.plans.m << "\n\n";

  char line[256];
  std::snprintf(line, sizeof(line),
                "%-5s %-7s %-16s %-16s %14s %14s %6s %16s %16s %16s %16s\n",
                "layer", "kind", "in", "out", "params_base", "params_actual",
                "rate", "mults_direct", "mults_wino3d", "mults_fsb", "mults_hfa");
  os << line;
  for (const LayerRow& r : rep.rows) {
    std::snprintf(line, sizeof(line),
                  "%-5d %-7s %-16s %-16s %14lld %14lld %6s %16s %16s %16s %16s\n",
                  r.index, layer_kind_name(r.kind), shape_str(r.in_shape).c_str(),
                  shape_str(r.out_shape).c_str(), (long long)r.params_base,
                  (long long)r.params_actual, rate_str(r.rate).c_str(),
                  opt_str(r.mults[0]).c_str(), opt_str(r.mults[1]).c_str(),
                  opt_str(r.mults[2]).c_str(), opt_str(r.mults[3]).c_str());
    os << line;
  }
  std::optional<double> total_rate;
  if (rep.total_params_actual > 0)
    total_rate = double(rep.total_params_base) / double(rep.total_params_actual);
  std::snprintf(line, sizeof(line),
                "%-5s %-7s %-16s %-16s %14lld %14lld %6s %16s %16s %16s %16s\n",
                "total", "", "", "", (long long)rep.total_params_base,
                (long long)rep.total_params_actual, rate_str(total_rate).c_str(),
                opt_str(rep.total_mults[0]).c_str(),
                opt_str(rep.total_mults[1]).c_str(),
                opt_str(rep.total_mults[2]).c_str(),
                opt_str(rep.total_mults[3]).c_str());
  os << line;

  os << "\nnotes:\n";
  os << "  - multiplication counts are per clip (batch 1); additions are not counted\n";
  os << "  - winograd counts use exact ceil-division tile grids; without tile rounding:";
  bool first = true;
  for (std::size_t ai = 0; ai < 4; ++ai) {
    if (!rep.total_mults_asymptotic[ai]) continue;
    std::snprintf(line, sizeof(line), "%s %s=%.4g",
                  first ? "" : ",", mult_algo_name(MultAlgo(ai)),
                  *rep.total_mults_asymptotic[ai]);
    os << line;
    first = false;
  }
  os << "\n";
  os << "  - the pooling schedule in the shipped configs is an assumption; parameter\n"
        "    totals do not depend on it, multiplication totals do\n";
  if (rep.model_name == "c3d" || rep.model_name == "fsb-c3d") {
    os << "  - published totals for this architecture family at clip 3x64x112x112:\n"
          "    direct 199.9G, wino3d 25.0G, fsb 27.6G, fsb+hfa 18.1G; they assume an\n"
          "    unstated pooling schedule and are not reproduced by these formulas\n";
  }
  return os.str();
}

}  // namespace fsbconv

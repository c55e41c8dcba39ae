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

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fsbconv/analyzer.hpp"
#include "fsbconv/model.hpp"
#include "fsbconv/tensor_io.hpp"
#include "fsbconv/verify.hpp"
#include "fsbconv/video_blocks.hpp"
#include "fsbconv/winograd.hpp"

namespace {

using namespace fsbconv;

// exit codes: 0 success, 1 verification failure, 2 usage/IO error
constexpr int kOk = 0;
constexpr int kVerifyFail = 1;
constexpr int kUsage = 2;

struct VerifyArgs {
  std::string suite = "all";
  int cases = 100;
  std::uint64_t seed = 1;
  std::string dtype = "f64";
};

int run_verify(const VerifyArgs& a) {
  const std::vector<Suite> suites = parse_suite_list(a.suite);
  const Dtype dtype = a.dtype == "f32" ? Dtype::f32 : Dtype::f64;
  std::printf("verify: suites=%s cases=%d seed=%llu dtype=%s\n", a.suite.c_str(),
              a.cases, (unsigned long long)a.seed, a.dtype.c_str());
  std::printf("%-8s %6s %12s %10s %s\n", "suite", "cases", "max_rel_err", "tol",
              "result");
  bool all_pass = true;
  for (const SuiteResult& r : run_suites(suites, a.cases, a.seed, dtype)) {
    std::printf("%-8s %6d %12.3e %10.1e %s\n", suite_name(r.suite), r.cases,
                r.max_err, r.tol, r.pass ? "pass" : "FAIL");
    all_pass = all_pass && r.pass;
  }
  std::printf("result: %s\n", all_pass ? "PASS" : "FAIL");
  return all_pass ? kOk : kVerifyFail;
}

struct AnalyzeArgs {
  std::string model;
  std::string input;
  std::string variants;
  int m1 = 2, m2 = 2;
  std::string format = "text";
};

Shape4 parse_shape4(const std::string& s) {
  Shape4 out;
  std::int64_t v[4];
  char extra;
  if (std::sscanf(s.c_str(), "%lld,%lld,%lld,%lld%c", (long long*)&v[0],
                  (long long*)&v[1], (long long*)&v[2], (long long*)&v[3],
                  &extra) != 4)
    throw Error("input shape must be C,T,H,W");
  out.c = v[0];
  out.t = v[1];
  out.h = v[2];
  out.w = v[3];
  if (out.c < 1 || out.t < 1 || out.h < 1 || out.w < 1)
    throw Error("input extents must be positive");
  return out;
}

std::set<MultAlgo> parse_variants(const std::string& s) {
  if (s.empty())
    return {MultAlgo::direct, MultAlgo::wino3d, MultAlgo::fsb_direct,
            MultAlgo::fsb_hfa};
  std::set<MultAlgo> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const std::size_t next = s.find(',', pos);
    const std::string tok = s.substr(pos, next == std::string::npos ? next : next - pos);
    if (tok == "direct") out.insert(MultAlgo::direct);
    else if (tok == "wino3d") out.insert(MultAlgo::wino3d);
    else if (tok == "fsb") out.insert(MultAlgo::fsb_direct);
    else if (tok == "hfa") out.insert(MultAlgo::fsb_hfa);
    else throw Error("unknown variant \"" + tok + "\" (expected direct|wino3d|fsb|hfa)");
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return out;
}

int run_analyze(const AnalyzeArgs& a) {
  ModelSpec spec = parse_model_file(a.model);
  if (!a.input.empty()) spec.input = parse_shape4(a.input);
  PlanExtents plans;
  plans.m1 = a.m1;
  plans.m2 = a.m2;
  plans.m = a.m1;  // the wino3d variant reuses the temporal tile extent
  const ComplexityReport rep = analyze_model(spec, parse_variants(a.variants), plans);
  const std::string text = a.format == "csv" ? render_csv(rep) : render_text(rep);
  std::fputs(text.c_str(), stdout);
  return kOk;
}

struct BenchArgs {
  std::string op;
  std::string shape;
  int repeat = 5;
};

struct BenchShape {
  std::int64_t nb = 1, c = 1, t = 1, h = 1, w = 1;
  std::int64_t k = 3;
  std::int64_t n = 0;  // 0: defaults to c
  std::int64_t m = 0;  // fsb intermediate width; 0: defaults to c
};

// Nb,C,T,H,W with optional k<int>, n<int>, m<int> suffixes,
// e.g. 1,16,8,32,32,k3,n32
BenchShape parse_bench_shape(const std::string& s) {
  BenchShape out;
  std::vector<std::string> toks;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const std::size_t next = s.find(',', pos);
    toks.push_back(s.substr(pos, next == std::string::npos ? next : next - pos));
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  if (toks.size() < 5) throw Error("shape must be Nb,C,T,H,W[,k<int>][,n<int>][,m<int>]");
  std::int64_t* dims[5] = {&out.nb, &out.c, &out.t, &out.h, &out.w};
  for (int i = 0; i < 5; ++i) {
    try {
      *dims[i] = std::stoll(toks[std::size_t(i)]);
    } catch (...) {
      throw Error("bad extent \"" + toks[std::size_t(i)] + "\"");
    }
    if (*dims[i] < 1) throw Error("extents must be positive");
  }
  for (std::size_t i = 5; i < toks.size(); ++i) {
    const std::string& t = toks[i];
    if (t.size() < 2) throw Error("bad shape token \"" + t + "\"");
    std::int64_t v;
    try {
      v = std::stoll(t.substr(1));
    } catch (...) {
      throw Error("bad shape token \"" + t + "\"");
    }
    if (t[0] == 'k') out.k = v;
    else if (t[0] == 'n') out.n = v;
    else if (t[0] == 'm') out.m = v;
    else throw Error("bad shape token \"" + t + "\" (expected k/n/m prefix)");
  }
  if (out.n == 0) out.n = out.c;
  if (out.m == 0) out.m = out.c;
  if (out.k < 1 || out.k % 2 == 0) throw Error("kernel extent must be odd (same padding)");
  return out;
}

double median_ms(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

template <typename F>
double time_ms(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

int run_bench(const BenchArgs& a) {
  const BenchShape bs = parse_bench_shape(a.shape);
  if (a.repeat < 1) throw Error("--repeat must be >= 1");
  const Dims5 in_dims{bs.nb, bs.c, bs.t, bs.h, bs.w};
  const auto input = Tensor5<float>::random(in_dims, 1);
  const Shape4 in_shape{bs.c, bs.t, bs.h, bs.w};
  PlanExtents plans;  // m1 = m2 = m = 2

  LayerSpec layer;
  layer.in = bs.c;
  layer.out = bs.n;
  layer.kernel = {bs.k, bs.k, bs.k};
  layer.fsb_m = bs.m;

  std::printf("op=%s shape=Nb%lld,C%lld,T%lld,H%lld,W%lld k=%lld n=%lld m=%lld repeat=%d\n",
              a.op.c_str(), (long long)bs.nb, (long long)bs.c, (long long)bs.t,
              (long long)bs.h, (long long)bs.w, (long long)bs.k, (long long)bs.n,
              (long long)bs.m, a.repeat);
  std::printf("%-10s %12s %18s\n", "kernel", "median_ms", "mults");

  auto report = [&](const char* name, const std::vector<double>& times,
                    std::int64_t mults) {
    std::printf("%-10s %12.3f %18lld\n", name, median_ms(times), (long long)mults);
  };

  if (a.op == "conv3d" || a.op == "wino3d") {
    layer.kind = LayerKind::conv3d;
    const auto ker = Tensor5<float>::random({bs.n, bs.c, bs.k, bs.k, bs.k}, 2);
    ConvGeometry g;
    g.pad = {(bs.k - 1) / 2, (bs.k - 1) / 2, (bs.k - 1) / 2};
    std::vector<double> times;
    if (a.op == "conv3d") {
      for (int i = 0; i < a.repeat; ++i)
        times.push_back(time_ms([&] { ref::conv3d_direct(input, ker, g); }));
      report("conv3d", times, bs.nb * mult_count(layer, in_shape, MultAlgo::direct, plans));
    } else {
      const WinogradPlan plan = cook_toom_plan(plans.m, int(bs.k));
      for (int i = 0; i < a.repeat; ++i)
        times.push_back(time_ms([&] { wino::conv3d(input, ker, plan, g); }));
      report("wino3d", times, bs.nb * mult_count(layer, in_shape, MultAlgo::wino3d, plans));
    }
    return kOk;
  }

  if (a.op == "fsb" || a.op == "hfa") {
    layer.kind = LayerKind::fsb;
    const auto w = FsbWeights<float>::random(bs.c, bs.m, bs.n, bs.k, bs.k, bs.k, 2);
    if (a.op == "fsb") {
      std::vector<double> times;
      for (int i = 0; i < a.repeat; ++i)
        times.push_back(time_ms([&] { fsb_forward(input, w); }));
      report("fsb", times, bs.nb * mult_count(layer, in_shape, MultAlgo::fsb_direct, plans));
      return kOk;
    }
    const HybridPlan hp = make_hybrid_plan(plans.m1, int(bs.k), plans.m2, int(bs.k));
    ConvGeometry g1;
    g1.pad = {(bs.k - 1) / 2, 0, 0};
    ConvGeometry g2;
    g2.pad = {0, (bs.k - 1) / 2, (bs.k - 1) / 2};
    g2.groups = bs.m;
    std::vector<double> t1, t2, t3, tt;
    for (int i = 0; i < a.repeat; ++i) {
      Tensor5<float> s1, s2, s3;
      const double d1 = time_ms([&] { s1 = wino::conv1d_temporal(input, w.stage1, hp.temporal, g1); });
      const double d2 = time_ms([&] { s2 = wino::conv2d_depthwise(s1, w.stage2, hp.spatial, g2); });
      const double d3 = time_ms([&] { s3 = ref::conv_pointwise(s2, w.stage3); });
      t1.push_back(d1);
      t2.push_back(d2);
      t3.push_back(d3);
      tt.push_back(d1 + d2 + d3);
    }
    const std::int64_t n1 = plans.m1 + bs.k - 1, n2 = plans.m2 + bs.k - 1;
    const std::int64_t ceil_t = (bs.t + plans.m1 - 1) / plans.m1;
    const std::int64_t ceil_h = (bs.h + plans.m2 - 1) / plans.m2;
    const std::int64_t ceil_w = (bs.w + plans.m2 - 1) / plans.m2;
    const std::int64_t s1m = bs.nb * bs.m * bs.c * bs.h * bs.w * ceil_t * n1;
    const std::int64_t s2m = bs.nb * bs.m * bs.t * ceil_h * ceil_w * n2 * n2;
    const std::int64_t s3m = bs.nb * bs.n * bs.m * bs.t * bs.h * bs.w;
    report("hfa.stage1", t1, s1m);
    report("hfa.stage2", t2, s2m);
    report("hfa.stage3", t3, s3m);
    report("hfa.total", tt, bs.nb * mult_count(layer, in_shape, MultAlgo::fsb_hfa, plans));
    return kOk;
  }

  throw Error("unknown op \"" + a.op + "\" (expected conv3d|wino3d|fsb|hfa)");
}

struct TrgArgs {
  std::string in_path;
  std::string out_path;
};

int run_trg(const TrgArgs& a) {
  const AnyTensor t = read_t5df(a.in_path);
  std::visit(
      [&](const auto& tensor) {
        write_t5df(trg_forward(tensor), a.out_path);
      },
      t);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fast 3D-convolution kernels and complexity analyzer"};
  app.require_subcommand(1);

  VerifyArgs va;
  CLI::App* verify = app.add_subcommand(
      "verify", "run randomized oracle-equivalence suites");
  verify->add_option("--suite", va.suite, "wino1d|wino2d|wino3d|fsb|hfa|trg|all")
      ->check(CLI::IsMember({"wino1d", "wino2d", "wino3d", "fsb", "hfa", "trg", "all"}))
      ->default_str("all");
  verify->add_option("--cases", va.cases, "cases per suite")->default_str("100");
  verify->add_option("--seed", va.seed, "base seed")->default_str("1");
  verify->add_option("--dtype", va.dtype, "f32|f64")
      ->check(CLI::IsMember({"f32", "f64"}))
      ->default_str("f64");

  AnalyzeArgs aa;
  CLI::App* analyze = app.add_subcommand(
      "analyze", "parameter and multiplication accounting for a model config");
  analyze->add_option("--model", aa.model, "model config path")->required();
  analyze->add_option("--input", aa.input, "input clip shape C,T,H,W (overrides the config)");
  analyze->add_option("--variants", aa.variants, "comma list of direct,wino3d,fsb,hfa (default all)");
  analyze->add_option("--m1", aa.m1, "temporal output tile extent")->default_str("2");
  analyze->add_option("--m2", aa.m2, "spatial output tile extent")->default_str("2");
  analyze->add_option("--format", aa.format, "text|csv")
      ->check(CLI::IsMember({"text", "csv"}))
      ->default_str("text");

  BenchArgs ba;
  CLI::App* bench = app.add_subcommand("bench", "time one kernel and report its mult count");
  bench->add_option("--op", ba.op, "conv3d|wino3d|fsb|hfa")
      ->check(CLI::IsMember({"conv3d", "wino3d", "fsb", "hfa"}))
      ->required();
  bench->add_option("--shape", ba.shape, "Nb,C,T,H,W[,k<int>][,n<int>][,m<int>]")->required();
  bench->add_option("--repeat", ba.repeat, "repetitions (median reported)")->default_str("5");

  TrgArgs ta;
  CLI::App* trg = app.add_subcommand("trg", "apply the temporal residual gradient to a T5DF file");
  trg->add_option("--in", ta.in_path, "input .t5df")->required();
  trg->add_option("--out", ta.out_path, "output .t5df")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the message and usage hint
    return kUsage;
  }

  try {
    if (*verify) {
      if (va.cases < 1) throw Error("--cases must be >= 1");
      return run_verify(va);
    }
    if (*analyze) return run_analyze(aa);
    if (*bench) return run_bench(ba);
    if (*trg) return run_trg(ta);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return kUsage;
  }
  return kUsage;
}

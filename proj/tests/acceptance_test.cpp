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

// End-to-end acceptance suite. Each criterion prints exactly one pass/fail
// line; the process exits nonzero when any criterion fails.

#include <array>
#include <bit>
#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "fsbconv/analyzer.hpp"
#include "fsbconv/counted.hpp"
#include "fsbconv/model.hpp"
#include "fsbconv/tensor_io.hpp"
#include "fsbconv/verify.hpp"
#include "fsbconv/video_blocks.hpp"
#include "fsbconv/winograd.hpp"

using namespace fsbconv;

namespace {

const std::string kCli = FSBCONV_CLI_PATH;
const std::string kConfigDir = FSBCONV_CONFIG_DIR;

int g_failures = 0;

void report(int idx, bool pass, const std::string& what) {
  std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", idx, what.c_str());
  if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof(buf), f, ap);
  va_end(ap);
  return buf;
}

// ---- criterion 1: oracle equivalence on 100 seeded cases per fast path ----
void criterion1() {
  const std::vector<Suite> suites = {Suite::wino1d, Suite::wino2d, Suite::wino3d,
                                     Suite::hfa};
  const auto t0 = std::chrono::steady_clock::now();
  double worst64 = 0.0, worst32 = 0.0;
  bool pass = true;
  for (const SuiteResult& r : run_suites(suites, 100, 7, Dtype::f64)) {
    worst64 = std::max(worst64, r.max_err);
    pass = pass && r.max_err <= 1e-9;
  }
  for (const SuiteResult& r : run_suites(suites, 100, 7, Dtype::f32)) {
    worst32 = std::max(worst32, r.max_err);
    pass = pass && r.max_err <= 1e-3;
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  pass = pass && secs < 60.0;
  report(1, pass,
         fmt("winograd oracle equivalence, 100 cases x 4 paths: f64 max %.3e "
             "(tol 1e-9), f32 max %.3e (tol 1e-3), %.1f s (< 60 s)",
             worst64, worst32, secs));
}

// ---- criterion 2: per-tile EWMM counts for F(2,3) ----
void criterion2() {
  const auto p = cook_toom_plan(2, 3);
  std::vector<Counted> g1(3, Counted(0.5)), d1(4, Counted(0.25)), y1(2);
  std::vector<Counted> g2(9, Counted(0.5)), d2(16, Counted(0.25)), y2(4);
  std::vector<Counted> g3(27, Counted(0.5)), d3(64, Counted(0.25)), y3(8);

  MulCounter::reset();
  wino::tile1d<Counted>(p, g1, d1, y1);
  const auto c1 = MulCounter::value();
  MulCounter::reset();
  wino::tile2d<Counted>(p, g2, d2, y2);
  const auto c2 = MulCounter::value();
  MulCounter::reset();
  wino::tile3d<Counted>(p, g3, d3, y3);
  const auto c3 = MulCounter::value();

  // direct correlations of the same tiles
  MulCounter::reset();
  for (int t = 0; t < 2; ++t)
    for (int s = 0; s < 3; ++s) (void)(g1[std::size_t(s)] * d1[std::size_t(t + s)]);
  const auto d1c = MulCounter::value();
  MulCounter::reset();
  for (int ty = 0; ty < 2; ++ty)
    for (int tx = 0; tx < 2; ++tx)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          (void)(g2[std::size_t(i * 3 + j)] * d2[std::size_t((ty + i) * 4 + tx + j)]);
  const auto d2c = MulCounter::value();
  MulCounter::reset();
  for (int tt = 0; tt < 2; ++tt)
    for (int ty = 0; ty < 2; ++ty)
      for (int tx = 0; tx < 2; ++tx)
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j)
            for (int l = 0; l < 3; ++l)
              (void)(g3[std::size_t((i * 3 + j) * 3 + l)] *
                     d3[std::size_t(((tt + i) * 4 + ty + j) * 4 + tx + l)]);
  const auto d3c = MulCounter::value();

  const bool pass = c1 == 4 && c2 == 16 && c3 == 64 && d1c == 6 && d2c == 36 && d3c == 216;
  report(2, pass,
         fmt("F(2,3) tile mults: counted %" PRIu64 "/%" PRIu64 "/%" PRIu64
             " (want 4/16/64) vs direct %" PRIu64 "/%" PRIu64 "/%" PRIu64
             " (want 6/36/216)",
             c1, c2, c3, d1c, d2c, d3c));
}

// ---- criterion 3: per-layer compression rates and exact parameter totals ----
void criterion3() {
  const auto t0 = std::chrono::steady_clock::now();
  const ModelSpec c3d = parse_model_file(kConfigDir + "/c3d.cfg");
  const ModelSpec fsb = parse_model_file(kConfigDir + "/fsb_c3d.cfg");
  const PlanExtents plans;
  const auto rc = analyze_model(c3d, {MultAlgo::direct}, plans);
  const auto rf = analyze_model(fsb, {MultAlgo::fsb_direct}, plans);

  // first fsb layer of each named stage (the last stage spans three layers)
  std::vector<double> rates;
  for (const LayerRow& row : rf.rows)
    if (row.kind == LayerKind::fsb) rates.push_back(*row.rate);
  const std::vector<double> printed_want = {1.0, 10.5, 10.7, 13.4, 10.7, 6.7};
  const std::vector<double> paper_want = {1.0, 10.5, 10.7, 13.3, 10.7, 6.7};
  bool pass = rates.size() == 8;
  std::string got = "rates";
  for (std::size_t i = 0; i < 6 && pass; ++i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%.1f", rates[i]);
    got += fmt(" %s", buf);
    pass = pass && std::atof(buf) == printed_want[i];
    pass = pass && std::abs(rates[i] - paper_want[i]) <= 0.1;
  }
  pass = pass && rc.total_params_actual == 27653184 && rf.total_params_actual == 3731136;
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  pass = pass && secs < 1.0;
  report(3, pass,
         fmt("table reproduction: %s, totals %lld vs %lld (want 27653184 vs "
             "3731136), %.3f s (< 1 s)",
             got.c_str(), (long long)rc.total_params_actual,
             (long long)rf.total_params_actual, secs));
}

// ---- criterion 4: typical-case FSB compression ----
void criterion4() {
  LayerSpec l;
  l.kind = LayerKind::fsb;
  l.in = 64;
  l.out = 64;
  l.kernel = {3, 3, 3};
  l.fsb_m = 64;  // alpha = 1
  const std::int64_t base = param_count_baseline(l);
  const std::int64_t actual = param_count(l);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%.1f", double(base) / double(actual));
  const bool pass = base == 110592 && actual == 16960 && std::string(buf) == "6.5";
  report(4, pass,
         fmt("typical 64-channel block: %lld / %lld = %.2f, printed %sx (want "
             "110592 / 16960 = 6.52, 6.5x)",
             (long long)base, (long long)actual, double(base) / double(actual), buf));
}

// ---- criterion 5: hfa reduction bracket and monotonicity ----
void criterion5() {
  const ModelSpec c3d = parse_model_file(kConfigDir + "/c3d.cfg");
  const ModelSpec fsb = parse_model_file(kConfigDir + "/fsb_c3d.cfg");
  const PlanExtents plans;  // m1 = m2 = 2
  const auto rc = analyze_model(c3d, {MultAlgo::direct}, plans);
  const auto rf = analyze_model(fsb, {MultAlgo::fsb_direct, MultAlgo::fsb_hfa}, plans);
  const std::int64_t direct = *rc.total_mults[std::size_t(MultAlgo::direct)];
  const std::int64_t fsb_m = *rf.total_mults[std::size_t(MultAlgo::fsb_direct)];
  const std::int64_t hfa_m = *rf.total_mults[std::size_t(MultAlgo::fsb_hfa)];
  const double ratio = double(fsb_m) / double(hfa_m);
  const bool monotone = direct > fsb_m && fsb_m > hfa_m;
  const bool bracket = ratio >= 1.4 && ratio <= 1.6;
  report(5, monotone && bracket,
         fmt("hfa reduction: fsb/hfa = %lld/%lld = %.3f (want within [1.40, "
             "1.60]); monotonicity direct %lld > fsb %lld > hfa %lld %s",
             (long long)fsb_m, (long long)hfa_m, ratio, (long long)direct,
             (long long)fsb_m, (long long)hfa_m, monotone ? "holds" : "VIOLATED"));
}

// ---- criterion 6: TRG properties on 100 random clips ----
void criterion6() {
  SplitMix64 rng(61);
  double worst = 0.0;
  bool extents_ok = true;
  for (int rep = 0; rep < 100; ++rep) {
    const Dims5 id{rng.range(1, 2), rng.range(1, 4), rng.range(2, 16),
                   rng.range(1, 8), rng.range(1, 8)};
    const auto in = Tensor5<double>::random(id, rng.next());
    const auto out = trg_forward(in);
    extents_ok = extents_ok && out.same_dims(in);
    const std::int64_t T = id[2], HW = id[3] * id[4];
    for (std::int64_t b = 0; b < id[0]; ++b)
      for (std::int64_t c = 0; c < id[1]; ++c)
        for (std::int64_t i = 0; i < HW; ++i) {
          double sum = 0.0;
          for (std::int64_t t = 0; t + 1 < T; ++t)
            sum += out.data()[out.offset(b, c, t, 0, 0) + i];
          const double want = in.data()[in.offset(b, c, T - 1, 0, 0) + i] -
                              in.data()[in.offset(b, c, 0, 0, 0) + i];
          worst = std::max(worst, std::abs(sum - want) / std::max(1.0, std::abs(want)));
        }

    // constant clip checks
    Tensor5<double> flat(id, rng.next_f64());
    const double cval = flat.data()[0];
    const auto fout = trg_forward(flat);
    for (std::int64_t t = 0; t < T; ++t) {
      const double v = fout.data()[fout.offset(0, 0, t, 0, 0)];
      const double want = (t + 1 < T) ? 0.0 : cval;
      worst = std::max(worst, std::abs(v - want) / std::max(1.0, std::abs(want)));
    }
  }

  MulCounter::reset();
  trg_forward(Tensor5<double>::random({1, 2, 8, 4, 4}, 62).cast<Counted>());
  const auto mults = MulCounter::value();

  const bool pass = extents_ok && worst <= 1e-12 && mults == 0;
  report(6, pass,
         fmt("trg on 100 clips: extents %s, telescoping+constant max err %.3e "
             "(tol 1e-12), counted multiplications %" PRIu64 " (want 0)",
             extents_ok ? "preserved" : "BROKEN", worst, mults));
}

// ---- criterion 7: plan correctness basis check ----
void criterion7() {
  double worst = 0.0;
  for (int m : {2, 3, 4})
    for (int r : {3, 5}) {
      if (m + r - 1 > 8) continue;
      const auto p = cook_toom_plan(m, r);
      const int n = p.n();
      for (int j = 0; j < r; ++j)
        for (int l = 0; l < n; ++l) {
          std::vector<double> g(std::size_t(r), 0.0), d(std::size_t(n), 0.0),
              y(std::size_t(m), 0.0);
          g[std::size_t(j)] = 1.0;
          d[std::size_t(l)] = 1.0;
          wino::tile1d<double>(p, g, d, y);
          for (int t = 0; t < m; ++t) {
            const double want = (t + j == l) ? 1.0 : 0.0;
            worst = std::max(worst, std::abs(y[std::size_t(t)] - want));
          }
        }
    }

  const auto p23 = cook_toom_plan(2, 3);
  const std::set<double> allowed = {0.0, 1.0, -1.0, 0.5, -0.5};
  bool entries_ok = true;
  for (int i = 0; i < 2 * 4; ++i) entries_ok = entries_ok && allowed.count(p23.at()[i]);
  for (int i = 0; i < 4 * 3; ++i) entries_ok = entries_ok && allowed.count(p23.g()[i]);
  for (int i = 0; i < 4 * 4; ++i) entries_ok = entries_ok && allowed.count(p23.bt()[i]);

  const bool pass = worst <= 1e-12 && entries_ok;
  report(7, pass,
         fmt("one-hot basis over all supported plans: max err %.3e (tol 1e-12); "
             "F(2,3) entries within {0, +-1, +-1/2}: %s",
             worst, entries_ok ? "yes" : "NO"));
}

// ---- criterion 8: end-to-end determinism ----
std::string capture(const std::string& cmd, int& exit_code) {
  std::string out;
  FILE* p = popen((cmd + " 2>/dev/null").c_str(), "r");
  if (!p) {
    exit_code = -1;
    return out;
  }
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof(buf), p)) > 0) out.append(buf, n);
  const int status = pclose(p);
  exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return out;
}

void criterion8() {
  const std::string cmd = kCli + " verify --suite all --cases 100 --seed 7";
  int ec1 = -1, ec2 = -1;
  const std::string run1 = capture(cmd, ec1);
  const std::string run2 = capture(cmd, ec2);
  const bool cli_ok = ec1 == 0 && ec2 == 0 && !run1.empty() && run1 == run2;

  // T5DF bit-exact round trip, NaN payload included
  const auto path = std::filesystem::temp_directory_path() /
                    ("fsbconv_acceptance_" + std::to_string(::getpid()) + ".t5df");
  auto t = Tensor5<double>::random({2, 3, 4, 5, 6}, 88);
  t.data()[7] = std::nan("");
  write_t5df(t, path);
  const AnyTensor back_any = read_t5df(path);
  const auto& back = std::get<Tensor5<double>>(back_any);
  bool bits_ok = back.same_dims(t);
  for (std::int64_t i = 0; bits_ok && i < t.size(); ++i)
    bits_ok = std::bit_cast<std::uint64_t>(back.data()[i]) ==
              std::bit_cast<std::uint64_t>(t.data()[i]);
  std::filesystem::remove(path);

  report(8, cli_ok && bits_ok,
         fmt("determinism: verify x2 exit codes %d/%d, stdout identical: %s "
             "(%zu bytes); T5DF round trip bit-exact: %s",
             ec1, ec2, run1 == run2 ? "yes" : "NO", run1.size(),
             bits_ok ? "yes" : "NO"));
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  if (g_failures == 0) {
    std::printf("acceptance: all criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d criterion(s) failed\n", g_failures);
  return 1;
}

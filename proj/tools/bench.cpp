// serial vs OpenMP timings for the parallel kernels; results must match bit for bit

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "invsub/contour.hpp"
#include "invsub/mc.hpp"

using namespace invsub;

namespace {

double median_seconds(const std::function<void()>& fn, int reps) {
  std::vector<double> t;
  for (int i = 0; i < reps; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    t.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  std::sort(t.begin(), t.end());
  return t[t.size() / 2];
}

struct Case {
  std::string name;
  std::function<std::vector<double>(quad::Exec)> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"serial vs parallel kernel timings"};
  int reps = 3, threads = 0;
  long paths = 400000;
  app.add_option("--reps", reps, "repetitions per kernel (median reported)")->check(CLI::PositiveNumber);
  app.add_option("--threads", threads, "OpenMP threads (0 = runtime default)");
  app.add_option("--paths", paths, "Monte Carlo paths")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);
  if (threads > 0) omp_set_num_threads(threads);

  auto gamma = make_gamma();
  auto ts = make_tempered_stable(0.5, 1.0);
  std::vector<double> grid;
  for (int i = 0; i < 64; ++i) grid.push_back(0.01 + i * (3.0 - 0.01) / 63);

  // KDE input: a fixed sample, sorted
  std::vector<double> sample(2000000);
  std::mt19937_64 rng(1);
  std::exponential_distribution<double> ex(1.0);
  for (auto& v : sample) v = ex(rng);
  std::sort(sample.begin(), sample.end());

  std::vector<Case> cases{
      {"bromwich gamma f(1,1)",
       [&](quad::Exec e) {
         auto s = ContourSpec::bromwich_at();
         s.exec = e;
         return std::vector<double>{invert_bromwich(gamma, {Target::f, 1.0, 1.0}, s).value};
       }},
      {"keyhole tempered f(1,2)",
       [&](quad::Exec e) {
         auto s = ContourSpec::keyhole();
         s.exec = e;
         return std::vector<double>{invert_keyhole(ts, {Target::f, 1.0, 2.0}, s).value};
       }},
      {"mc stable(1/2) t=1",
       [&](quad::Exec e) {
         SimulationConfig cfg;
         cfg.n_paths = paths;
         cfg.rng_seed = 42;
         cfg.exec = e;
         return estimate_inverse_density(make_stable(0.5), 1.0, grid, cfg).estimate;
       }},
      {"mc gamma t=1 (grid clock)",
       [&](quad::Exec e) {
         SimulationConfig cfg;
         cfg.n_paths = paths / 4;
         cfg.rng_seed = 42;
         cfg.exec = e;
         return estimate_inverse_density(gamma, 1.0, grid, cfg).estimate;
       }},
      {"reflected kde 2e6 x 64",
       [&](quad::Exec e) { return reflected_kde(sample, grid, 0.02, double(sample.size()), e); }},
  };

  std::printf("threads: %d\n", omp_get_max_threads());
  std::printf("%-28s %12s %12s %8s %s\n", "kernel", "serial s", "parallel s", "speedup", "identical");
  bool all_same = true;
  for (auto& c : cases) {
    std::vector<double> a, b;
    const double ts_ = median_seconds([&] { a = c.run(quad::Exec::serial); }, reps);
    const double tp = median_seconds([&] { b = c.run(quad::Exec::parallel); }, reps);
    const bool same = a == b;
    all_same = all_same && same;
    std::printf("%-28s %12.4f %12.4f %8.2f %s\n", c.name.c_str(), ts_, tp, ts_ / tp, same ? "yes" : "NO");
  }
  return all_same ? 0 : 1;
}

// scratch driver: probe the independence builder level by level
#include <chrono>
#include <cstdio>

#include "apwin/dynamics.hpp"
#include "apwin/independence.hpp"

using namespace apwin;

int main(int argc, char** argv) {
  int n = argc > 1 ? std::atoi(argv[1]) : 4;
  Rotation rot(2, -1, 1, 1);
  ReturnTimes rt(rot, 8);
  auto plan = plan_parameters(rt, Rat(1, 10), 3);
  auto C = std::make_shared<const CantorApprox>(build_cantor(rot, plan));
  auto W = window_W(C);
  Window Wc(WindowKind::Custom, W.rot);
  Wc.set = W.set.complement();
  std::fprintf(stderr, "built: %zu gaps, boundary %zu\n", C->gaps.size(), W.boundary().size());

  IndependenceOptions opts;
  opts.verbose = true;
  auto t0 = std::chrono::steady_clock::now();
  try {
    auto cert = build_independence_set(Wc, W, n, opts);
    auto t1 = std::chrono::steady_clock::now();
    std::fprintf(stderr, "built cert n=%d in %.1fs; S =", n,
                 std::chrono::duration<double>(t1 - t0).count());
    for (auto& k : cert.S) std::fprintf(stderr, " %s", k.str().c_str());
    std::fprintf(stderr, "\n");
    auto chk = verify_certificate(cert, Wc, W);
    auto t2 = std::chrono::steady_clock::now();
    std::fprintf(stderr, "verify: %s (%.1fs)\n", chk.ok ? "ok" : chk.failure.c_str(),
                 std::chrono::duration<double>(t2 - t1).count());
    return chk.ok ? 0 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "FAILED: %s\n", e.what());
    return 2;
  }
}

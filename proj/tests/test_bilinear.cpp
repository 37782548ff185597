#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "loewner/bilinear.hpp"

using namespace loewner;

namespace {

BilinearModel random_bilinear(Eigen::Index n, Rng& rng) {
  RMat e = RMat::Identity(n, n), a(n, n), nn(n, n), b(n, 1), c(1, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      e(i, j) += 0.05 * rng.normal();
      a(i, j) = rng.normal();
      nn(i, j) = 0.4 * rng.normal();
    }
    a(i, i) -= double(n) + 1.0;
    b(i, 0) = rng.normal();
    c(0, i) = rng.normal();
  }
  BilinearModel bm;
  bm.E = e.cast<Cplx>();
  bm.A = a.cast<Cplx>();
  bm.N = nn.cast<Cplx>();
  bm.B = b.cast<Cplx>();
  bm.C = c.cast<Cplx>();
  bm.field = Field::Real;
  return bm;
}

KernelOracle oracle_of(const BilinearModel& m) {
  return [&m](const std::vector<Cplx>& pts) {
    return eval_generalized_tf(m, pts);
  };
}

std::vector<Cplx> imag_pts(int n, double lo, double hi, double phase) {
  std::vector<Cplx> out;
  if (n == 1) return {Cplx(phase, lo)};
  for (double w : log_space(lo, hi, n)) out.push_back(Cplx(phase, w));
  return out;
}

double rel(Cplx got, Cplx want) {
  return std::abs(got - want) / std::max(1e-12, std::abs(want));
}

// Burgers-type quadratic-bilinear fixture: diffusion with upwind quadratic
// convection, left-boundary input, right Dirichlet wall.
QuadraticBilinearSpec burgers_like(Eigen::Index n, double visc) {
  const double h = 1.0 / double(n + 1);
  QuadraticBilinearSpec spec;
  spec.F1 = RMat::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    spec.F1(i, i) = -2.0 * visc / (h * h);
    if (i > 0) spec.F1(i, i - 1) = visc / (h * h);
    if (i + 1 < n) spec.F1(i, i + 1) = visc / (h * h);
  }
  spec.F2 = RMat::Zero(n, n * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    spec.F2(i, i * n + i) -= 1.0 / h;
    if (i > 0) spec.F2(i, i * n + (i - 1)) += 1.0 / h;
  }
  spec.G0 = RMat::Zero(n, 1);
  spec.G0(0, 0) = visc / (h * h);
  spec.G1 = RMat::Zero(n, n);
  spec.G1(0, 0) = 1.0 / h;
  // observe the node next to the driven boundary so the output carries signal
  spec.c = RMat::Zero(1, n);
  spec.c(0, 0) = 1.0;
  return spec;
}

}  // namespace

TEST_CASE("carleman blocks for a scalar quadratic-bilinear system") {
  QuadraticBilinearSpec spec;
  spec.F1 = RMat::Constant(1, 1, -1.5);
  spec.F2 = RMat::Zero(1, 1);
  spec.G0 = RMat::Constant(1, 1, 2.0);
  spec.G1 = RMat::Constant(1, 1, 0.3);
  spec.c = RMat::Constant(1, 1, 1.0);
  BilinearModel bm = carleman(spec);
  REQUIRE(bm.n() == 2);
  CHECK(bm.A(0, 0) == Cplx(-1.5, 0));
  CHECK(bm.A(1, 1) == Cplx(-3.0, 0));
  CHECK(bm.A(1, 0) == Cplx(0, 0));
  CHECK(bm.N(0, 0) == Cplx(0.3, 0));
  CHECK(bm.N(1, 0) == Cplx(4.0, 0));
  CHECK(bm.N(1, 1) == Cplx(0.6, 0));
  CHECK(bm.B(0, 0) == Cplx(2.0, 0));
  CHECK(bm.B(1, 0) == Cplx(0, 0));

  // first kernel is the transfer of the linear part
  for (double w : {0.0, 0.7, 3.0}) {
    const Cplx s(0.2, w);
    CHECK(rel(eval_generalized_tf(bm, {s}), 2.0 / (s + 1.5)) < 1e-14);
  }

  CHECK_THROWS_WITH_AS(carleman(spec, 3),
                       doctest::Contains("UnsupportedTruncation"), Error);
}

TEST_CASE("carleman of a purely linear spec has vanishing higher kernels") {
  Rng rng(3);
  const Eigen::Index n = 3;
  QuadraticBilinearSpec spec;
  spec.F1 = RMat(n, n);
  spec.G0 = RMat(n, 1);
  spec.c = RMat(1, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) spec.F1(i, j) = rng.normal();
    spec.F1(i, i) -= 4.0;
    spec.G0(i, 0) = rng.normal();
    spec.c(0, i) = rng.normal();
  }
  spec.F2 = RMat::Zero(n, n * n);
  spec.G1 = RMat::Zero(n, n);
  BilinearModel bm = carleman(spec);

  DescriptorModel lin;
  lin.E = Mat::Identity(n, n);
  lin.A = spec.F1.cast<Cplx>();
  lin.B = spec.G0.cast<Cplx>();
  lin.C = spec.c.cast<Cplx>();
  lin.D = Mat::Zero(1, 1);
  lin.field = Field::Real;
  for (double w : {0.3, 1.1, 6.0}) {
    const Cplx s(0.1, w);
    CHECK(rel(eval_generalized_tf(bm, {s}),
              eval_transfer(lin, s)(0, 0)) < 1e-12);
    CHECK(std::abs(eval_generalized_tf(bm, {s, s + Cplx(0.3, 0)})) < 1e-13);
    CHECK(std::abs(eval_generalized_tf(
              bm, {s, s + Cplx(0.3, 0), s + Cplx(0.9, 0)})) < 1e-13);
  }
}

TEST_CASE("generalized kernels of the scalar unit model") {
  BilinearModel bm;
  bm.E = Mat::Identity(1, 1);
  bm.A = Mat::Constant(1, 1, -1.0);
  bm.N = Mat::Identity(1, 1);
  bm.B = Mat::Identity(1, 1);
  bm.C = Mat::Identity(1, 1);
  bm.field = Field::Real;
  CHECK(rel(eval_generalized_tf(bm, {Cplx(0, 0), Cplx(0, 0)}), 1.0) < 1e-14);
  const Cplx s1(0.5, 1.0), s2(-0.2, 2.0), s3(1.0, -0.3);
  CHECK(rel(eval_generalized_tf(bm, {s1, s2}),
            1.0 / ((s1 + 1.0) * (s2 + 1.0))) < 1e-14);
  CHECK(rel(eval_generalized_tf(bm, {s1, s2, s3}),
            1.0 / ((s1 + 1.0) * (s2 + 1.0) * (s3 + 1.0))) < 1e-14);

  // kernels above order one vanish without coupling
  BilinearModel nb = bm;
  nb.N = Mat::Zero(1, 1);
  CHECK(std::abs(eval_generalized_tf(nb, {s1, s2})) == 0.0);

  // multilinear in B
  BilinearModel sb = bm;
  sb.B *= 3.5;
  CHECK(rel(eval_generalized_tf(sb, {s1, s2}),
            3.5 * eval_generalized_tf(bm, {s1, s2})) < 1e-14);

  CHECK_THROWS_WITH_AS(eval_generalized_tf(bm, {Cplx(-1.0, 0.0)}),
                       doctest::Contains("SingularPencil"), Error);
  CHECK_THROWS_WITH_AS(eval_generalized_tf(bm, {}),
                       doctest::Contains("EmptyTuple"), Error);
}

TEST_CASE("tuple chains grow one point at a time and restart at the depth") {
  std::vector<Cplx> la, mu;
  for (int i = 0; i < 5; ++i) {
    la.push_back(Cplx(0, i + 1.0));
    mu.push_back(Cplx(0, i + 10.0));
  }
  InterpolationTuples t = make_tuples(la, mu, 2);
  CHECK(t.right_tuple(0) == std::vector<Cplx>{la[0]});
  CHECK(t.right_tuple(1) == std::vector<Cplx>({la[1], la[0]}));
  CHECK(t.right_tuple(2) == std::vector<Cplx>{la[2]});
  CHECK(t.right_tuple(3) == std::vector<Cplx>({la[3], la[2]}));
  CHECK(t.left_tuple(0) == std::vector<Cplx>{mu[0]});
  CHECK(t.left_tuple(1) == std::vector<Cplx>({mu[0], mu[1]}));
  CHECK(t.left_tuple(4) == std::vector<Cplx>{mu[4]});

  InterpolationTuples full = make_tuples(la, mu, 0);
  CHECK(full.left_tuple(4).size() == 5);
  CHECK(full.right_tuple(4).front() == la[4]);
  CHECK(full.right_tuple(4).back() == la[0]);

  std::vector<Cplx> dup = la;
  dup[3] = mu[2];
  CHECK_THROWS_WITH_AS(make_tuples(dup, mu, 0),
                       doctest::Contains("CoincidentPoints"), Error);
}

TEST_CASE("factored products equal the divided-difference assembly") {
  Rng rng(21);
  BilinearModel src = random_bilinear(6, rng);
  for (Eigen::Index depth : {0, 2}) {
    InterpolationTuples t = make_tuples(imag_pts(3, 0.5, 3.0, 0.0),
                                        imag_pts(3, 0.8, 4.0, 0.1), depth);
    BilinearLoewnerSet dd = build_bilinear_set(oracle_of(src), t);
    BilinearLoewnerSet fc = factored_loewner_set(src, t);
    CAPTURE(depth);
    CHECK((dd.L - fc.L).norm() < 1e-10 * fc.L.norm());
    CHECK((dd.Ms - fc.Ms).norm() < 1e-10 * fc.Ms.norm());
    CHECK((dd.T - fc.T).norm() < 1e-10 * fc.T.norm());
    CHECK((dd.V - fc.V).norm() < 1e-10 * fc.V.norm());
    CHECK((dd.W - fc.W).norm() < 1e-10 * fc.W.norm());
  }
}

TEST_CASE("sylvester residuals of the assembled quintet") {
  Rng rng(5);
  BilinearModel src = random_bilinear(5, rng);
  for (Eigen::Index depth : {0, 2}) {
    InterpolationTuples t = make_tuples(imag_pts(4, 0.4, 2.5, 0.0),
                                        imag_pts(4, 0.6, 3.5, 0.1), depth);
    BilinearLoewnerSet set = build_bilinear_set(oracle_of(src), t);
    const Eigen::Index k = t.k();
    const Eigen::Index d = depth > 0 ? depth : k;
    Mat la = Mat::Zero(k, k), mu = Mat::Zero(k, k);
    Mat sr = Mat::Zero(k, k), sl = Mat::Zero(k, k);
    Mat rsel = Mat::Zero(1, k), lsel = Mat::Zero(k, 1);
    for (Eigen::Index i = 0; i < k; ++i) {
      la(i, i) = t.lambda_points[size_t(i)];
      mu(i, i) = t.mu_points[size_t(i)];
      if (i % d == 0) {
        rsel(0, i) = 1.0;
        lsel(i, 0) = 1.0;
      } else {
        sr(i - 1, i) = 1.0;
        sl(i, i - 1) = 1.0;
      }
    }
    const Mat right = set.L * la + set.T * sr + set.V * rsel;
    const Mat left = mu * set.L + sl * set.T + lsel * set.W;
    CAPTURE(depth);
    CHECK((set.Ms - right).norm() < 1e-10 * set.Ms.norm());
    CHECK((set.Ms - left).norm() < 1e-10 * set.Ms.norm());
  }
}

TEST_CASE("order-two realization matches its eight data values") {
  Rng rng(9);
  BilinearModel src = random_bilinear(5, rng);
  const std::vector<Cplx> la = {Cplx(0, 0.7), Cplx(0, 1.9)};
  const std::vector<Cplx> mu = {Cplx(0, 1.1), Cplx(0, 2.6)};
  InterpolationTuples t = make_tuples(la, mu, 0);
  BilinearModel re = realize_bilinear(build_bilinear_set(oracle_of(src), t));
  REQUIRE(re.n() == 2);
  const std::vector<std::vector<Cplx>> eight = {
      {mu[0]},
      {mu[0], mu[1]},
      {la[0]},
      {la[1], la[0]},
      {mu[0], la[0]},
      {mu[0], mu[1], la[0]},
      {mu[0], la[1], la[0]},
      {mu[0], mu[1], la[1], la[0]}};
  for (const auto& tuple : eight) {
    CAPTURE(tuple.size());
    CHECK(rel(eval_generalized_tf(re, tuple),
              eval_generalized_tf(src, tuple)) < 1e-10);
  }
}

TEST_CASE("exact-order sources are recovered") {
  for (Eigen::Index n : {1, 2, 4, 6, 8}) {
    Rng rng(40 + std::uint64_t(n));
    BilinearModel src = random_bilinear(n, rng);
    const Eigen::Index depth = n >= 3 ? 3 : n;
    InterpolationTuples t =
        make_tuples(imag_pts(int(n), 0.4, 3.0, 0.0),
                    imag_pts(int(n), 0.5, 4.2, 0.15), depth);
    BilinearModel re = realize_bilinear(build_bilinear_set(oracle_of(src), t));
    CAPTURE(n);
    CHECK(re.n() == n);
    Rng probe(77);
    for (int trial = 0; trial < 8; ++trial) {
      std::vector<Cplx> pts;
      const int len = 1 + trial % 3;
      for (int q = 0; q < len; ++q)
        pts.push_back(Cplx(probe.uniform(0.2, 1.5), probe.uniform(-4.0, 4.0)));
      CHECK(rel(eval_generalized_tf(re, pts), eval_generalized_tf(src, pts)) <
            1e-7);
    }
  }
}

TEST_CASE("linear sources collapse to the classical construction") {
  Rng rng(14);
  BilinearModel src = random_bilinear(3, rng);
  src.N = Mat::Zero(3, 3);
  InterpolationTuples t = make_tuples(imag_pts(3, 0.3, 2.0, 0.0),
                                      imag_pts(3, 0.45, 2.8, 0.1), 1);
  BilinearLoewnerSet set = build_bilinear_set(oracle_of(src), t);
  CHECK(set.T.norm() == 0.0);
  for (Eigen::Index j = 0; j < 3; ++j)
    for (Eigen::Index i = 0; i < 3; ++i) {
      const Cplx num = eval_generalized_tf(src, {t.mu_points[size_t(j)]}) -
                       eval_generalized_tf(src, {t.lambda_points[size_t(i)]});
      const Cplx want = num / (t.mu_points[size_t(j)] - t.lambda_points[size_t(i)]);
      CHECK(rel(set.L(j, i), want) < 1e-12);
    }
  BilinearModel re = realize_bilinear(set);
  CHECK(re.N.norm() == 0.0);
  Rng probe(31);
  for (int q = 0; q < 10; ++q) {
    const Cplx s(probe.uniform(0.1, 1.0), probe.uniform(-3.0, 3.0));
    CHECK(rel(eval_generalized_tf(re, {s}), eval_generalized_tf(src, {s})) <
          1e-9);
  }
}

TEST_CASE("reduction projects the quintet") {
  Rng rng(55);
  BilinearModel src = random_bilinear(4, rng);
  InterpolationTuples t = make_tuples(imag_pts(4, 0.4, 3.0, 0.0),
                                      imag_pts(4, 0.5, 4.0, 0.1), 2);
  BilinearLoewnerSet set = build_bilinear_set(oracle_of(src), t);
  BilinearModel full = realize_bilinear(set);
  BilinearModel proj = reduce_bilinear(set, 4);
  for (int q = 0; q < 6; ++q) {
    const Cplx s1(0.3, 0.5 + q), s2(0.6, -1.0 - q);
    CHECK(rel(eval_generalized_tf(proj, {s1}),
              eval_generalized_tf(full, {s1})) < 1e-9);
    CHECK(rel(eval_generalized_tf(proj, {s1, s2}),
              eval_generalized_tf(full, {s1, s2})) < 1e-9);
  }

  // redundant data: realization refuses, projection recovers
  Rng rng6(56);
  BilinearModel src6 = random_bilinear(6, rng6);
  InterpolationTuples t10 = make_tuples(imag_pts(10, 0.3, 5.0, 0.0),
                                        imag_pts(10, 0.42, 6.1, 0.12), 3);
  BilinearLoewnerSet set10 = build_bilinear_set(oracle_of(src6), t10);
  CHECK_THROWS_WITH_AS(realize_bilinear(set10),
                       doctest::Contains("SingularLoewner"), Error);
  BilinearModel red = reduce_bilinear(set10, 6);
  Rng probe(91);
  for (int q = 0; q < 6; ++q) {
    std::vector<Cplx> pts;
    for (int w = 0; w <= q % 2; ++w)
      pts.push_back(Cplx(probe.uniform(0.2, 1.0), probe.uniform(-4.0, 4.0)));
    CHECK(rel(eval_generalized_tf(red, pts), eval_generalized_tf(src6, pts)) <
          1e-7);
  }

  // one-state source at r=1 is exact
  Rng rng1(57);
  BilinearModel src1 = random_bilinear(1, rng1);
  InterpolationTuples t1 = make_tuples({Cplx(0, 0.9)}, {Cplx(0, 1.7)}, 0);
  BilinearModel r1 =
      reduce_bilinear(build_bilinear_set(oracle_of(src1), t1), 1);
  CHECK(rel(eval_generalized_tf(r1, {Cplx(0.4, 0.2)}),
            eval_generalized_tf(src1, {Cplx(0.4, 0.2)})) < 1e-10);

  CHECK_THROWS_WITH_AS(reduce_bilinear(set, 5),
                       doctest::Contains("RankTooLarge"), Error);
}

TEST_CASE("carleman lift of the convection fixture tracks the nonlinear solution") {
  const Eigen::Index n = 10;
  QuadraticBilinearSpec spec = burgers_like(n, 0.05);
  BilinearModel bm = carleman(spec);
  REQUIRE(bm.n() == 110);

  // runs the lift and a direct integration of the quadratic system at one
  // input amplitude; returns the peak output mismatch relative to the peak
  auto mismatch = [&](double amp) {
    const double dt = 1e-3;
    const Eigen::Index steps = 2000;
    TimeSeries in;
    in.step = dt;
    in.u.resize(steps + 1, 1);
    for (Eigen::Index k = 0; k <= steps; ++k)
      in.u(k, 0) = amp * std::cos(2.0 * double(k) * dt);
    TimeSeries lifted = simulate_bilinear(bm, in, "rk4");

    RVec x = RVec::Zero(n);
    auto f = [&](const RVec& state, double u) {
      RVec quad(n * n);
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
          quad(i * n + j) = state(i) * state(j);
      return RVec(spec.F1 * state + spec.F2 * quad +
                  (spec.G0 + spec.G1 * state) * u);
    };
    double worst = 0.0, scale = 0.0;
    for (Eigen::Index k = 0; k <= steps; ++k) {
      const double y = (spec.c * x)(0, 0);
      worst = std::max(worst, std::abs(y - lifted.y(k, 0)));
      scale = std::max(scale, std::abs(y));
      if (k == steps) break;
      const double t0 = double(k) * dt;
      auto uat = [&](double tt) { return amp * std::cos(2.0 * tt); };
      const RVec k1 = f(x, uat(t0));
      const RVec k2 = f(x + 0.5 * dt * k1, uat(t0 + 0.5 * dt));
      const RVec k3 = f(x + 0.5 * dt * k2, uat(t0 + 0.5 * dt));
      const RVec k4 = f(x + dt * k3, uat(t0 + dt));
      x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return worst / scale;
  };

  // the lift drops only terms cubic in the state, so the relative output
  // error must fall off quadratically with the input amplitude
  const double big = mismatch(0.2), small = mismatch(0.05);
  CHECK(small < 2e-3);
  CHECK(big / small > 8.0);
  CHECK(big / small < 40.0);
}

TEST_CASE("assembly is deterministic") {
  Rng rng(77);
  BilinearModel src = random_bilinear(3, rng);
  InterpolationTuples t = make_tuples(imag_pts(3, 0.4, 2.0, 0.0),
                                      imag_pts(3, 0.5, 2.4, 0.1), 2);
  BilinearLoewnerSet a = build_bilinear_set(oracle_of(src), t);
  BilinearLoewnerSet b = build_bilinear_set(oracle_of(src), t);
  CHECK((a.L - b.L).norm() == 0.0);
  CHECK((a.T - b.T).norm() == 0.0);
}

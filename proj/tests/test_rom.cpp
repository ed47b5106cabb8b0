#include <Eigen/Dense>
#include <cmath>
#include <complex>

#include "doctest.h"
#include "promdao/hdm.hpp"
#include "promdao/manifolds.hpp"
#include "promdao/rom.hpp"
#include "promdao/rng.hpp"
#include "test_util.hpp"

using namespace promdao;
using testing::random_spd;

namespace {

HdmConfig tiny_config(int nf, int ns, std::uint64_t seed) {
  HdmConfig config;
  config.nf = nf;
  config.ns = ns;
  config.seed = seed;
  config.space.lower = Eigen::VectorXd::Constant(6, -0.5);
  config.space.upper = Eigen::VectorXd::Constant(6, 1.5);
  config.roles = {ParamRole::FluidShape,      ParamRole::FluidShape,
                  ParamRole::StructStiffness, ParamRole::StructStiffness,
                  ParamRole::StructDamping,   ParamRole::StructDamping};
  return config;
}

Eigen::VectorXd sweep_band(const StructRob& rob) {
  const double wmax = rob.frequencies(rob.frequencies.size() - 1);
  Eigen::VectorXd freqs(5);
  freqs << 0.0, 0.5 * wmax, 1.0 * wmax, 1.5 * wmax, 2.0 * wmax;
  return freqs;
}

std::vector<std::complex<double>> sorted_spectrum(const Eigen::MatrixXd& a,
                                                  const Eigen::MatrixXd& b) {
  const EigPairs e = general_eig(a.partialPivLu().solve(b));
  std::vector<std::complex<double>> v(e.values.data(), e.values.data() + e.values.size());
  std::sort(v.begin(), v.end(), [](auto x, auto y) {
    return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
  });
  return v;
}

}  // namespace

TEST_CASE("structural ROB on a diagonal eigenproblem") {
  FsiOperators ops;
  ops.M = Eigen::MatrixXd::Identity(3, 3);
  ops.K = Eigen::Vector3d(1, 4, 9).asDiagonal();
  const StructRob rob = build_structural_rob(ops, 2);
  CHECK(rob.frequencies(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rob.frequencies(1) == doctest::Approx(2.0).epsilon(1e-12));
  Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(3, 2);
  expected(0, 0) = 1.0;
  expected(1, 1) = 1.0;
  CHECK((rob.V_u - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("structural ROB mass-orthonormality and residual on a random pencil") {
  Rng rng(7);
  FsiOperators ops;
  ops.M = random_spd(rng, 12, 1.0);
  ops.K = random_spd(rng, 12, 0.5);
  const StructRob rob = build_structural_rob(ops, 5);
  CHECK((rob.V_u.transpose() * ops.M * rob.V_u - Eigen::MatrixXd::Identity(5, 5))
            .cwiseAbs()
            .maxCoeff() < 1e-10);
  const Eigen::MatrixXd kproj = rob.V_u.transpose() * ops.K * rob.V_u;
  const Eigen::MatrixXd omega2 = rob.frequencies.array().square().matrix().asDiagonal();
  CHECK((kproj - omega2).norm() <= 1e-8 * omega2.norm());
  for (int m = 0; m < 5; ++m) {
    const double w2 = rob.frequencies(m) * rob.frequencies(m);
    CHECK((ops.K * rob.V_u.col(m) - w2 * ops.M * rob.V_u.col(m)).norm() <= 1e-8 * ops.K.norm());
  }
  // Ascending frequencies.
  for (int m = 1; m < 5; ++m) CHECK(rob.frequencies(m) >= rob.frequencies(m - 1));
}

TEST_CASE("structural ROB rejects an indefinite stiffness matrix") {
  FsiOperators ops;
  ops.M = Eigen::MatrixXd::Identity(3, 3);
  ops.K = Eigen::Vector3d(1, -1, 2).asDiagonal();
  CHECK_THROWS_AS(build_structural_rob(ops, 2), Error);
}

TEST_CASE("fluid ROB snapshot count and compression") {
  FsiHdm hdm(tiny_config(40, 5, 3));
  const FsiOperators ops = hdm.operators(Eigen::VectorXd::Zero(6));
  const StructRob srob = build_structural_rob(ops, 2);

  SUBCASE("2 n_s N_l snapshots collected") {
    Eigen::VectorXd freqs(3);
    freqs << 0.0, 1.0, 2.0;
    const FluidRob rob = build_fluid_rob(ops, srob, freqs, 12, 0.0);
    CHECK(rob.n_snapshots == 12);
    CHECK(has_orthonormal_columns(rob.V_w, 1e-10));
    CHECK(rob.projection == Projection::Galerkin);
  }
  SUBCASE("zero-frequency-only sweep drops the zero imaginary columns") {
    Eigen::VectorXd freqs(1);
    freqs << 0.0;
    const FluidRob rob = build_fluid_rob(ops, srob, freqs, 4, 0.0);
    CHECK(rob.V_w.cols() <= 2);  // static solves: imaginary parts vanish
  }
  SUBCASE("tolerance-0 basis reproduces every snapshot") {
    const FluidRob rob = build_fluid_rob(ops, srob, sweep_band(srob), 20, 0.0);
    const std::complex<double> im(0.0, 1.0);
    for (double kappa : {0.0, srob.frequencies(1)}) {
      const Eigen::MatrixXcd lhs = im * kappa * ops.A + ops.H;
      const Eigen::VectorXcd rhs =
          -(im * kappa * ops.R + ops.G) * srob.V_u.col(0).cast<std::complex<double>>();
      const Eigen::VectorXcd w = lhs.partialPivLu().solve(rhs);
      const Eigen::VectorXd re = w.real();
      const Eigen::VectorXd proj = rob.V_w * (rob.V_w.transpose() * re);
      CHECK((proj - re).norm() <= 1e-9 * std::max(1.0, re.norm()));
    }
  }
}

TEST_CASE("stabilize_left_rob keeps Galerkin for positive-spectrum reduced blocks") {
  Rng rng(11);
  FsiOperators ops;
  ops.H = random_spd(rng, 10, 1.0);
  FluidRob rob;
  rob.V_w = testing::random_orthonormal(rng, 10, 4);
  rob.W_w = rob.V_w;
  const FluidRob out = stabilize_left_rob(ops, rob);
  CHECK(out.projection == Projection::Galerkin);
  CHECK((out.W_w - rob.V_w).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("stabilize_left_rob 2x2 fallback example") {
  FsiOperators ops;
  ops.H = Eigen::MatrixXd::Zero(2, 2);
  ops.H(0, 0) = -1.0;
  ops.H(1, 1) = 2.0;
  FluidRob rob;
  rob.V_w = Eigen::MatrixXd::Zero(2, 1);
  rob.V_w(0, 0) = 1.0;
  rob.W_w = rob.V_w;
  const FluidRob out = stabilize_left_rob(ops, rob);
  CHECK(out.projection == Projection::PetrovGalerkin);
  const Eigen::MatrixXd reduced = out.W_w.transpose() * ops.H * out.V_w;
  CHECK(reduced(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("stabilize_left_rob fallback always yields a stable reduced block") {
  Rng rng(13);
  int fallbacks = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 8;
    // Indefinite symmetric part makes Galerkin instability likely.
    Eigen::MatrixXd h = rng.normal_matrix(n, n);
    h -= 1.2 * Eigen::MatrixXd::Identity(n, n);
    FsiOperators ops;
    ops.H = h;
    FluidRob rob;
    rob.V_w = testing::random_orthonormal(rng, n, 3);
    rob.W_w = rob.V_w;
    const FluidRob out = stabilize_left_rob(ops, rob);
    const EigPairs eig = general_eig(out.W_w.transpose() * ops.H * out.V_w);
    CHECK(eig.values.real().minCoeff() > 0.0);
    if (out.projection == Projection::PetrovGalerkin) ++fallbacks;
  }
  CHECK(fallbacks > 10);  // the family actually exercises the fallback
}

TEST_CASE("assemble_prom dimension arithmetic n_q = n_f + 2 n_s") {
  PromTuple t = PromTuple::from_blocks(
      Eigen::MatrixXd::Identity(100, 100), Eigen::MatrixXd::Identity(100, 100),
      Eigen::MatrixXd::Zero(100, 6), Eigen::MatrixXd::Zero(100, 6), Eigen::MatrixXd::Zero(6, 100),
      Eigen::MatrixXd::Identity(6, 6), Eigen::MatrixXd::Identity(6, 6));
  CHECK(t.nq() == 112);
}

TEST_CASE("assemble_prom with square ROBs preserves the spectrum") {
  FsiHdm hdm(tiny_config(20, 4, 17));
  const FsiOperators ops = hdm.operators(Eigen::VectorXd::Zero(6));
  const StructRob srob = build_structural_rob(ops, 4);
  const FluidRob frob = build_fluid_rob(ops, srob, sweep_band(srob), 20, 0.0);
  REQUIRE(frob.V_w.cols() == 20);  // exact-rank fluid basis
  const FluidRob stab = stabilize_left_rob(ops, frob);
  const PromTuple tuple = assemble_prom(ops, stab, srob);
  const BlockOperators blocks = assemble_blocks(ops);

  const auto rom_spec = sorted_spectrum(tuple.calA_r, tuple.calB_r);
  const auto hdm_spec = sorted_spectrum(blocks.calA, blocks.calB);
  REQUIRE(rom_spec.size() == hdm_spec.size());
  double scale = 0.0;
  for (auto v : hdm_spec) scale = std::max(scale, std::abs(v));
  for (std::size_t i = 0; i < rom_spec.size(); ++i) {
    CHECK(std::abs(rom_spec[i] - hdm_spec[i]) <= 1e-8 * scale);
  }

  // Structural identity blocks are exact.
  const int nf = tuple.nf, ns = tuple.ns;
  CHECK((tuple.calA_r.block(nf, nf, ns, ns) - Eigen::MatrixXd::Identity(ns, ns))
            .cwiseAbs()
            .maxCoeff() == 0.0);
  CHECK((tuple.calA_r.block(nf + ns, nf + ns, ns, ns) - Eigen::MatrixXd::Identity(ns, ns))
            .cwiseAbs()
            .maxCoeff() == 0.0);
  // Zero pattern of eq. blocks holds exactly.
  CHECK(tuple.calA_r.block(0, nf, nf, 2 * ns).cwiseAbs().maxCoeff() == 0.0);
  CHECK(tuple.calB_r.block(nf + ns, 0, ns, nf).cwiseAbs().maxCoeff() == 0.0);
  CHECK(tuple.calB_r.block(nf + ns, nf + ns, ns, ns).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("PROM frequency response matches the HDM at trained frequencies") {
  FsiHdm hdm(tiny_config(24, 4, 19));
  const FsiOperators ops = hdm.operators(Eigen::VectorXd::Zero(6));
  const StructRob srob = build_structural_rob(ops, 4);
  // Tolerance-0 compression keeps the full numerically significant snapshot
  // space, which is what frequency-response reproduction needs.
  const FluidRob frob = build_fluid_rob(ops, srob, sweep_band(srob), 24, 0.0);
  const std::complex<double> im(0.0, 1.0);
  for (int l = 0; l < 5; ++l) {
    const double kappa = sweep_band(srob)(l);
    for (int m = 0; m < 4; ++m) {
      const Eigen::VectorXcd rhs_full =
          -(im * kappa * ops.R + ops.G) * srob.V_u.col(m).cast<std::complex<double>>();
      const Eigen::VectorXcd w_full =
          (im * kappa * ops.A + ops.H).partialPivLu().solve(rhs_full);
      const Eigen::MatrixXcd lhs_red =
          (frob.W_w.transpose() * (im * kappa * ops.A + ops.H) * frob.V_w);
      const Eigen::VectorXcd rhs_red = frob.W_w.transpose().cast<std::complex<double>>() * rhs_full;
      const Eigen::VectorXcd w_red = lhs_red.partialPivLu().solve(rhs_red);
      CHECK((frob.V_w * w_red - w_full).norm() <= 1e-6 * w_full.norm());
    }
  }
}

TEST_CASE("enforce_consistency") {
  FsiHdm hdm(tiny_config(30, 4, 23));
  const Eigen::VectorXd mu = Eigen::VectorXd::Zero(6);
  const FsiOperators ops = hdm.operators(mu);
  const StructRob srob = build_structural_rob(ops, 3);
  const FluidRob frob = stabilize_left_rob(ops, build_fluid_rob(ops, srob, sweep_band(srob), 8, 1e-12));

  PromEntry ref;
  ref.mu_r = Eigen::VectorXd::Zero(2);
  ref.mu = mu;
  ref.tuple = assemble_prom(ops, frob, srob);
  ref.V_w = frob.V_w;
  ref.W_w = frob.W_w;
  ref.V_u = srob.V_u;
  ref.projection = frob.projection;

  SUBCASE("single entry is unchanged") {
    std::vector<PromEntry> entries{ref};
    enforce_consistency(entries, 0);
    CHECK((entries[0].tuple.calB_r - ref.tuple.calB_r).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("permuted duplicate is rotated back onto the reference") {
    PromEntry perm = ref;
    const int nf = static_cast<int>(ref.V_w.cols());
    Eigen::MatrixXd pi = Eigen::MatrixXd::Zero(nf, nf);
    for (int j = 0; j < nf; ++j) pi(j, (j + 1) % nf) = 1.0;  // cyclic column shuffle
    perm.V_w = ref.V_w * pi;
    perm.W_w = ref.W_w * pi;
    FluidRob permuted_rob{perm.V_w, perm.W_w, ref.projection, frob.singular_values,
                          frob.n_snapshots};
    perm.tuple = assemble_prom(ops, permuted_rob, srob);

    std::vector<PromEntry> entries{ref, perm};
    enforce_consistency(entries, 0);
    CHECK((entries[1].tuple.calA_r - ref.tuple.calA_r).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((entries[1].tuple.calB_r - ref.tuple.calB_r).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((entries[1].V_w - ref.V_w).cwiseAbs().maxCoeff() < 1e-10);
  }

  SUBCASE("congruence preserves the generalized spectrum") {
    FsiHdm hdm2(tiny_config(30, 4, 23));
    Eigen::VectorXd mu2 = Eigen::VectorXd::Zero(6);
    mu2(0) = 0.3;
    const FsiOperators ops2 = hdm2.operators(mu2);
    const StructRob srob2 = build_structural_rob(ops2, 3);
    const FluidRob frob2 =
        stabilize_left_rob(ops2, build_fluid_rob(ops2, srob2, sweep_band(srob2), 8, 1e-12));
    PromEntry other;
    other.mu_r = Eigen::VectorXd::Ones(2);
    other.mu = mu2;
    other.tuple = assemble_prom(ops2, frob2, srob2);
    other.V_w = frob2.V_w;
    other.W_w = frob2.W_w;
    other.V_u = srob2.V_u;

    const auto before = sorted_spectrum(other.tuple.calA_r, other.tuple.calB_r);
    std::vector<PromEntry> entries{ref, other};
    enforce_consistency(entries, 0);
    const auto after = sorted_spectrum(entries[1].tuple.calA_r, entries[1].tuple.calB_r);
    double scale = 0.0;
    for (auto v : before) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < before.size(); ++i) {
      CHECK(std::abs(before[i] - after[i]) <= 1e-10 * scale);
    }
  }
}

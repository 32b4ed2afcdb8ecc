#include "rhsos/certificate.h"

#include <random>

#include <gtest/gtest.h>

#include "oracles.h"
#include "rhsos/generators.h"

namespace rhsos {
namespace {

Certificate SolveAndRecover(const LMIProgram& prog) {
  SdpOptions opt;
  opt.tol = 1e-9;
  const SdpSolution sol = SolveSdp(prog.sdp, opt);
  EXPECT_EQ(sol.status, SdpStatus::kOptimal) << sol.message;
  return RecoverCertificate(prog, sol);
}

TEST(GramPolynomialTest, RankOneGramIsSquaredModulus) {
  const MonomialBasis b(2, 1);
  Eigen::VectorXcd w(3);
  w << Complex(1.0, 0.5), Complex(-0.3, 0.2), Complex(0.7, -1.1);
  GramBlock block{-1, b.entries(), w * w.adjoint()};
  const CPoly sigma = GramPolynomial(block);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 10; ++trial) {
    const std::vector<Complex> z = {Complex(g(rng), g(rng)), Complex(g(rng), g(rng))};
    Complex h = 0.0;
    for (int q = 0; q < 3; ++q) h += std::conj(w(q)) * oracle::MonomialValue(z, b[q], {0, 0});
    const Complex s = sigma.Evaluate(z);
    EXPECT_NEAR(s.real(), std::norm(h), 1e-10 * (1 + std::norm(h)));
    EXPECT_NEAR(s.imag(), 0.0, 1e-10 * (1 + std::norm(h)));
  }
}

TEST(CertificateTest, ThreeVariableExampleLowerBound) {
  const CPOPInstance inst = UnimodularTriple();
  const LMIProgram prog = BuildRealRelaxation(inst, 1);
  const Certificate cert = SolveAndRecover(prog);
  EXPECT_TRUE(cert.valid);
  EXPECT_LE(cert.residual, 1e-6);
  EXPECT_NEAR(cert.gamma, -3.75, 1e-5);
  // f - gamma is nonnegative on the feasible set up to the residual.
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const auto z = oracle::RandomTorusPoint(3, rng);
    EXPECT_GE(oracle::UnimodularTripleObjective(z) - cert.gamma, -1e-6);
  }
}

TEST(CertificateTest, ComplexHierarchyCertificateAndSymmetrization) {
  const CPOPInstance inst = RandomQuadratic(3, 4);
  const LMIProgram cprog = BuildComplexRelaxation(inst, 1);
  const Certificate c = SolveAndRecover(cprog);
  EXPECT_TRUE(c.valid) << c.residual;
  const LMIProgram rprog = BuildRealRelaxation(inst, 1);
  const Certificate s = SymmetrizeCertificate(rprog, c);
  EXPECT_TRUE(s.valid) << s.residual;
  EXPECT_DOUBLE_EQ(s.gamma, c.gamma);
  for (const GramBlock& b : s.blocks) EXPECT_EQ(b.gram.imag().norm(), 0.0);
}

TEST(CertificateTest, RemainderIsSmallPolynomial) {
  const CPOPInstance inst = RandomQuartic(2, 2);
  const LMIProgram prog = BuildRealRelaxation(inst, 2);
  const Certificate cert = SolveAndRecover(prog);
  const CPoly rem = CertificateRemainder(prog, cert);
  EXPECT_LE(rem.MaxAbsCoefficient(), 1e-6);
  EXPECT_DOUBLE_EQ(rem.MaxAbsCoefficient(), CertificateResidual(prog, cert));
}

TEST(CertificateTest, RealPopCertificate) {
  const LMIProgram prog = BuildRealPopRelaxation(GapRealPop(), 2);
  const Certificate cert = SolveAndRecover(prog);
  EXPECT_TRUE(cert.valid) << cert.residual;
  EXPECT_NEAR(cert.gamma, 1.0 - std::sqrt(2.0), 1e-5);
  EXPECT_THROW(CertificateRemainder(prog, cert), std::invalid_argument);
}

TEST(CertificateTest, EvaluateCertificateIsReproducible) {
  const LMIProgram prog = BuildRealRelaxation(UnimodularTriple(), 1);
  const Certificate cert = SolveAndRecover(prog);
  Certificate again = cert;
  again.residual = -1.0;
  EvaluateCertificate(prog, again);
  EXPECT_EQ(again.residual, cert.residual);
  EXPECT_EQ(again.min_gram_eigenvalue, cert.min_gram_eigenvalue);
}

TEST(CertificateTest, MismatchedSolutionThrows) {
  const LMIProgram prog = BuildRealRelaxation(UnimodularTriple(), 1);
  SdpSolution empty;
  EXPECT_THROW(RecoverCertificate(prog, empty), std::invalid_argument);
}

}  // namespace
}  // namespace rhsos

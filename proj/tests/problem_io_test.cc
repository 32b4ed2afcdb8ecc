#include "rhsos/problem_io.h"

#include <cstdio>
#include <filesystem>

#include <gtest/gtest.h>

#include "rhsos/generators.h"
#include "rhsos/relaxation.h"

namespace rhsos {
namespace {

void ExpectSameInstance(const CPOPInstance& a, const CPOPInstance& b) {
  EXPECT_EQ(a.name, b.name);
  EXPECT_EQ(a.n, b.n);
  EXPECT_EQ(a.sense, b.sense);
  EXPECT_EQ(a.objective, b.objective);
  EXPECT_EQ(a.ineqs, b.ineqs);
  EXPECT_EQ(a.eqs, b.eqs);
  EXPECT_EQ(a.complex_eqs, b.complex_eqs);
  EXPECT_EQ(a.conjectured_optimum, b.conjectured_optimum);
  EXPECT_EQ(a.value_transform, b.value_transform);
}

TEST(ProblemIoTest, CanonicalTextRoundTrips) {
  for (const std::string& family : FamilyNames()) {
    const int n = family == "mordell" ? 3 : family.rfind("polyphase", 0) == 0 ? 4 : 2;
    const CPOPInstance inst = MakeFamily(family, n, 17);
    const std::string text = SerializeProblem(inst);
    const CPOPInstance back = ParseProblem(text);
    ExpectSameInstance(inst, back);
    EXPECT_EQ(SerializeProblem(back), text) << family;
  }
}

TEST(ProblemIoTest, RejectsTermWithoutConjugatePartner) {
  const std::string text = R"({
    "n": 1,
    "objective": [{"beta": [1], "gamma": [0], "re": 0, "im": 1}]
  })";
  try {
    ParseProblem(text);
    FAIL() << "expected a parse error";
  } catch (const ProblemParseError& e) {
    EXPECT_EQ(e.location(), "/objective/0");
    EXPECT_NE(std::string(e.what()).find("beta=[1] gamma=[0]"), std::string::npos);
  }
}

TEST(ProblemIoTest, AcceptsComplexEqualitiesWithoutPartner) {
  const std::string text = R"({
    "n": 1,
    "objective": [{"beta": [1], "gamma": [1], "re": 1}],
    "complex_eqs": [[{"beta": [1], "gamma": [0], "re": 1},
                     {"beta": [0], "gamma": [0], "re": -1}]]
  })";
  const CPOPInstance inst = ParseProblem(text);
  EXPECT_EQ(inst.complex_eqs.size(), 1u);
  EXPECT_EQ(inst.sense, Sense::kMinimize);
}

TEST(ProblemIoTest, SyntaxErrorReportsLineAndColumn) {
  const std::string text = "{\n  \"n\": 1,\n  \"objective\": [,]\n}";
  try {
    ParseProblem(text);
    FAIL() << "expected a parse error";
  } catch (const ProblemParseError& e) {
    EXPECT_EQ(e.location().rfind("line 3:", 0), 0u) << e.location();
  }
}

TEST(ProblemIoTest, StructuralErrorsNameTheField) {
  auto location = [](const std::string& text) {
    try {
      ParseProblem(text);
    } catch (const ProblemParseError& e) {
      return e.location();
    }
    return std::string("no error");
  };
  EXPECT_EQ(location(R"({"objective": []})"), "/n");
  EXPECT_EQ(location(R"({"n": 2, "objective": [{"beta": [1], "gamma": [0, 0]}]})"),
            "/objective/0/beta");
  EXPECT_EQ(location(R"({"n": 1, "objective": [], "sense": "up"})"), "/sense");
  EXPECT_EQ(location(R"({"n": 1, "objective": [], "colour": 1})"), "/colour");
  EXPECT_EQ(location(R"({"n": 1, "objective": [], "ineqs": [[{"beta": [-1], "gamma": [0]}]]})"),
            "/ineqs/0/0/beta/0");
}

TEST(ProblemIoTest, RealCoefficientRequirement) {
  CPOPInstance inst = UnimodularTriple();
  EXPECT_NO_THROW(RequireRealCoefficients(inst));
  CPoly g(3);
  g.AddTerm({{1, 0, 0}, {0, 0, 0}}, Complex(0.0, 1.0));
  g.AddTerm({{0, 0, 0}, {1, 0, 0}}, Complex(0.0, -1.0));
  inst.ineqs.push_back(g);
  try {
    RequireRealCoefficients(inst);
    FAIL() << "expected a parse error";
  } catch (const ProblemParseError& e) {
    EXPECT_EQ(e.location(), "/ineqs/0");
  }
}

TEST(ProblemIoTest, ExampleRoundTripsThroughFileAndSolves) {
  const auto path = std::filesystem::temp_directory_path() / "rhsos_unimodular_test.cpop";
  SaveProblem(path.string(), UnimodularTriple());
  const CPOPInstance inst = LoadProblem(path.string());
  std::filesystem::remove(path);
  const LMIProgram prog = BuildRealRelaxation(inst, 1);
  const SdpSolution sol = SolveSdp(prog.sdp);
  EXPECT_NEAR(sol.sos_objective, -3.75, 1e-5);
  EXPECT_THROW(LoadProblem(path.string()), std::runtime_error);
}

}  // namespace
}  // namespace rhsos

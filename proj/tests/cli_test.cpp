#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "cli.hpp"
#include "equivocation/verify.hpp"

namespace equivocation::cli {
namespace {

namespace fs = std::filesystem;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  TempDir() : path_(fs::temp_directory_path() / ("equivocation_cli_" + std::to_string(counter_++))) {
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }

  std::string write(const std::string& name, const std::string& text) const {
    const auto file = path_ / name;
    std::ofstream(file) << text;
    return file.string();
  }
  std::string path(const std::string& name) const { return (path_ / name).string(); }

 private:
  static inline int counter_ = 0;
  fs::path path_;
};

// Exactly one JSON document on stdout.
Json single_document(const std::string& out) {
  std::istringstream in(out);
  std::string line;
  std::getline(in, line);
  std::string rest;
  std::getline(in, rest);
  EXPECT_TRUE(rest.empty()) << "extra stdout: " << rest;
  return Json::parse(line);
}

TEST(ParseDistributionTest, Examples) {
  const auto uniform = parse_distribution(R"({"nx":2,"ny":1,"probs":[[0.5],[0.5]]})");
  EXPECT_EQ(uniform, JointDistribution::uniform(2, 1));
  EXPECT_THROW(parse_distribution(R"({"nx":2,"ny":1,"probs":[[0.6],[0.5]]})"), ValidationError);
  const auto joint = parse_distribution(R"({"nx":2,"ny":2,"probs":[[0.5,0.25],[0.0,0.25]]})");
  EXPECT_NEAR(conditional_entropy(joint), 0.5, 1e-15);
}

TEST(ParseDistributionTest, MalformedJsonIsAParseError) {
  EXPECT_THROW(parse_distribution(R"({"nx":2,"ny":1,"probs":[[0.5],[0.5]])"), ParseError);
  EXPECT_THROW(parse_distribution(R"({"nx":1,"ny":1,"probs":[[NaN]]})"), ParseError);
}

TEST(ParseDistributionTest, ValidationMessagesNameTheField) {
  const auto message = [](const std::string& text) {
    try {
      parse_distribution(text);
    } catch (const ValidationError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_NE(message(R"({"nx":2,"ny":1,"probs":[[1.5],[-0.5]]})").find("probs[1][0]"),
            std::string::npos);
  EXPECT_NE(message(R"({"nx":2,"ny":1,"probs":[[1.0],["x"]]})").find("probs[1][0]"),
            std::string::npos);
  EXPECT_NE(message(R"({"nx":2,"ny":2,"probs":[[1.0,0.0],[0.0]]})").find("probs[1]"),
            std::string::npos);
  EXPECT_NE(message(R"({"ny":1,"probs":[[1.0]]})").find("nx"), std::string::npos);
  EXPECT_NE(message(R"({"nx":0,"ny":1,"probs":[]})").find("nx"), std::string::npos);
  EXPECT_NE(message(R"([1, 2])").find("object"), std::string::npos);
  EXPECT_NE(message(R"({"nx":1,"ny":1,"probs":[[1e400]]})"), "no error");
}

TEST(ParseDistributionTest, ClampsTinyNegatives) {
  const auto joint = parse_distribution(R"({"nx":2,"ny":1,"probs":[[1.0],[-1e-13]]})");
  EXPECT_EQ(joint(1, 0), 0.0);
}

TEST(ParseDistributionTest, RoundTripIsBitExact) {
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    const auto joint = sample_joint(1 + seed % 5, 1 + seed % 4, seed);
    EXPECT_EQ(parse_distribution(to_json(joint).dump()), joint);
  }
}

TEST(DispatchTest, BoundGolden) {
  const auto r = run({"bound", "--epsilon", "0.5", "--nx", "2"});
  EXPECT_EQ(r.code, kSuccess);
  EXPECT_EQ(r.out, "{\"value\":1.0,\"clamped\":false}\n");
}

TEST(DispatchTest, BoundClamped) {
  const auto doc = single_document(run({"bound", "--epsilon", "0.9", "--nx", "2"}).out);
  EXPECT_EQ(doc["value"].get<double>(), 1.0);
  EXPECT_TRUE(doc["clamped"].get<bool>());
}

TEST(DispatchTest, TvOfIdenticalFiles) {
  TempDir dir;
  const std::string text = R"({"nx":2,"ny":2,"probs":[[0.1,0.4],[0.2,0.3]]})";
  const auto a = dir.write("a.json", text);
  const auto b = dir.write("b.json", text);
  const auto r = run({"tv", a, b});
  EXPECT_EQ(r.code, kSuccess);
  EXPECT_EQ(r.out, "{\"tv\":0.0}\n");
}

TEST(DispatchTest, ExtremalGolden) {
  const auto r = run({"extremal", "--epsilon", "0.5", "--nx", "2", "--ny", "1"});
  EXPECT_EQ(r.code, kSuccess);
  const auto doc = single_document(r.out);
  EXPECT_EQ(parse_distribution(doc["p"].dump()), JointDistribution::from_rows({{0.5}, {0.5}}));
  EXPECT_EQ(parse_distribution(doc["q"].dump()), JointDistribution::from_rows({{1.0}, {0.0}}));
}

TEST(DispatchTest, EntropyReport) {
  TempDir dir;
  const auto file = dir.write("j.json", R"({"nx":2,"ny":2,"probs":[[0.5,0.25],[0.0,0.25]]})");
  for (const char* formula : {"mixture", "difference", "direct"}) {
    const auto r = run({"entropy", file, "--formula", formula});
    ASSERT_EQ(r.code, kSuccess) << r.err;
    const auto doc = single_document(r.out);
    EXPECT_NEAR(doc["H_X_given_Y"].get<double>(), 0.5, 1e-15) << formula;
    EXPECT_NEAR(doc["H_Y"].get<double>(), 1.0, 1e-15);
    EXPECT_NEAR(doc["H_XY"].get<double>(), 1.5, 1e-15);
  }
}

TEST(DispatchTest, WalkWritesJsonLinesTrace) {
  TempDir dir;
  const auto p = dir.write("p.json", R"({"nx":2,"ny":2,"probs":[[0.25,0.25],[0.25,0.25]]})");
  const auto q = dir.write("q.json", R"({"nx":2,"ny":2,"probs":[[0.5,0.5],[0.0,0.0]]})");
  const auto trace = dir.path("trace.jsonl");
  const auto r = run({"walk", p, q, "--trace-file", trace, "--snapshots", "all"});
  ASSERT_EQ(r.code, kSuccess) << r.err;
  const auto doc = single_document(r.out);
  EXPECT_NEAR(doc["final"]["gap"].get<double>(), 1.0, 1e-9);
  EXPECT_NEAR(doc["estimate"]["bound_at_initial_tv"].get<double>(), 1.0, 1e-12);

  std::ifstream in(trace);
  std::string line;
  std::size_t lines = 0;
  double previous_tv = 2.0;
  while (std::getline(in, line)) {
    const auto step = Json::parse(line);
    ASSERT_TRUE(step.contains("label"));
    ASSERT_TRUE(step.contains("p"));
    ASSERT_TRUE(step.contains("q"));
    EXPECT_LE(step["tv"].get<double>(), previous_tv + 1e-9);
    previous_tv = step["tv"].get<double>();
    ++lines;
  }
  EXPECT_EQ(lines, doc["steps"].get<std::size_t>());
}

TEST(DispatchTest, WalkWithoutSnapshots) {
  TempDir dir;
  const auto p = dir.write("p.json", R"({"nx":2,"ny":1,"probs":[[0.5],[0.5]]})");
  const auto q = dir.write("q.json", R"({"nx":2,"ny":1,"probs":[[1.0],[0.0]]})");
  const auto trace = dir.path("trace.jsonl");
  ASSERT_EQ(run({"walk", p, q, "--trace-file", trace, "--snapshots", "none"}).code, kSuccess);
  std::ifstream in(trace);
  std::string line;
  while (std::getline(in, line)) {
    const auto step = Json::parse(line);
    EXPECT_FALSE(step.contains("p"));
    EXPECT_TRUE(step.contains("gap"));
  }
}

TEST(DispatchTest, VerifyReportIsDeterministic) {
  const std::vector<std::string> args{"verify", "--nx", "3", "--ny", "2", "--trials", "200",
                                      "--seed", "5"};
  const auto first = run(args);
  ASSERT_EQ(first.code, kSuccess) << first.err;
  EXPECT_EQ(first.out, run(args).out);
  const auto doc = single_document(first.out);
  EXPECT_EQ(doc["violations"].get<int>(), 0);
  EXPECT_EQ(doc["trials"].get<int>(), 200);
  EXPECT_TRUE(doc["worst_pair"].is_object());
}

TEST(DispatchTest, VerifyFixedEpsilon) {
  const auto r = run({"verify", "--nx", "2", "--ny", "1", "--trials", "1", "--seed", "7",
                      "--eps", "0"});
  ASSERT_EQ(r.code, kSuccess);
  EXPECT_EQ(single_document(r.out)["max_gap_over_bound_ratio"].get<double>(), 0.0);
}

TEST(DispatchTest, Search) {
  const auto r = run({"search", "--nx", "2", "--ny", "1", "--epsilon", "0.5", "--steps", "20"});
  ASSERT_EQ(r.code, kSuccess) << r.err;
  const auto doc = single_document(r.out);
  EXPECT_NEAR(doc["max_gap"].get<double>(), 1.0, 1e-12);
  EXPECT_NEAR(doc["bound"].get<double>(), 1.0, 1e-12);
}

TEST(DispatchTest, ExitCodes) {
  TempDir dir;
  const auto bad_mass = dir.write("bad.json", R"({"nx":2,"ny":1,"probs":[[0.6],[0.5]]})");
  const auto malformed = dir.write("broken.json", R"({"nx":2,)");
  const auto good = dir.write("good.json", R"({"nx":2,"ny":1,"probs":[[0.5],[0.5]]})");
  const auto other_shape = dir.write("other.json", R"({"nx":1,"ny":1,"probs":[[1.0]]})");

  EXPECT_EQ(run({"tv", bad_mass, good}).code, kValidation);
  EXPECT_EQ(run({"tv", good, other_shape}).code, kValidation);
  EXPECT_EQ(run({"bound", "--epsilon", "2", "--nx", "2"}).code, kValidation);
  EXPECT_EQ(run({"search", "--nx", "3", "--ny", "3", "--epsilon", "0.3"}).code, kValidation);
  EXPECT_EQ(run({"entropy", malformed}).code, kMalformed);
  EXPECT_EQ(run({"frobnicate"}).code, kUsage);
  EXPECT_EQ(run({}).code, kUsage);
  EXPECT_EQ(run({"bound", "--nx", "2"}).code, kUsage);
  EXPECT_EQ(run({"walk", good, good, "--snapshots", "some"}).code, kUsage);
  EXPECT_EQ(run({"tv", dir.path("missing.json"), good}).code, kUsage);

  const auto r = run({"tv", bad_mass, good});
  EXPECT_TRUE(r.out.empty());
  EXPECT_NE(r.err.find("total mass"), std::string::npos);
}

}  // namespace
}  // namespace equivocation::cli

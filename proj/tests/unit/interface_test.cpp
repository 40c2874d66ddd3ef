#include <gtest/gtest.h>
#include <httplib.h>

#include <cstdio>
#include <fstream>

#include "support.hpp"
#include "testforge/errors.hpp"
#include "testforge/interface/service.hpp"

using namespace testforge;
using namespace testforge::interface;
using nlohmann::json;

namespace {

std::shared_ptr<const judge::Judge> engine() {
  static auto j = std::make_shared<const judge::Judge>(
      std::make_shared<toolchain::ProfileRegistry>(TESTFORGE_PROFILE_DIR), judge::JudgeConfig{});
  return j;
}

judge::TestSuite sum_suite(const std::string& id) {
  judge::TestSuite s;
  s.problem_id = id;
  s.cases = {judge::TestCase{"1 2\n", "3\n"}, judge::TestCase{"-4 4\n", "0\n"},
             judge::TestCase{"10 5\n", "15\n"}};
  return s;
}

std::filesystem::path store_dir(const std::string& name, int n) {
  auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  for (int i = 0; i < n; ++i) {
    judge::save_suite((dir / ("p" + std::to_string(i) + ".json")).string(),
                      sum_suite("p" + std::to_string(i)));
  }
  return dir;
}

json request(const std::string& id, const std::string& source, const std::string& lang = "python3") {
  return {{"problem_id", id}, {"source", source}, {"language", lang}};
}

const char* kSum = "a, b = map(int, input().split())\nprint(a + b)\n";

std::string run_command(const std::string& cmd, int* status) {
  std::string out;
  FILE* p = popen(cmd.c_str(), "r");
  char buf[4096];
  for (std::size_t n; (n = std::fread(buf, 1, sizeof buf, p)) > 0;) out.append(buf, n);
  *status = pclose(p);
  return out;
}

}  // namespace

TEST(SuiteStore, LoadsAndReloads) {
  auto dir = store_dir("tf_store_reload", 2);
  SuiteStore store(dir);
  EXPECT_EQ(store.size(), 2u);
  EXPECT_TRUE(store.find("p1"));
  EXPECT_FALSE(store.find("p9"));
  judge::save_suite((dir / "p9.json").string(), sum_suite("p9"));
  store.reload();
  EXPECT_TRUE(store.find("p9"));
  judge::save_suite((dir / "again.json").string(), sum_suite("p9"));
  EXPECT_THROW(store.reload(), InputError);
  EXPECT_EQ(store.size(), 3u);  // previous set kept
  EXPECT_THROW(SuiteStore("/nonexistent/suites"), InputError);
}

TEST(Request, Validation) {
  EXPECT_THROW(parse_reward_request(json::array()), InputError);
  EXPECT_THROW(parse_reward_request({{"problem_id", "p"}, {"source", "x"}}), InputError);
  EXPECT_THROW(parse_reward_request({{"problem_id", 3}, {"source", "x"}, {"language", "cpp"}}),
               InputError);
  auto bad_flag = request("p", "x");
  bad_flag["early_stop"] = "yes";
  EXPECT_THROW(parse_reward_request(bad_flag), InputError);
  auto r = parse_reward_request(request("p", "x"));
  EXPECT_FALSE(r.early_stop);
  EXPECT_TRUE(r.per_case);
}

TEST(Service, StatusCodes) {
  RewardService svc({}, engine(), std::make_shared<SuiteStore>(store_dir("tf_store_codes", 1)));
  EXPECT_EQ(svc.handle_judge("{not json").first, 400);
  EXPECT_EQ(svc.handle_judge(request("nope", kSum).dump()).first, 404);
  EXPECT_EQ(svc.handle_judge(request("p0", kSum, "cobol").dump()).first, 400);

  auto [ok, doc] = svc.handle_judge(request("p0", kSum).dump());
  EXPECT_EQ(ok, 200);
  EXPECT_EQ(doc["pass_rate"], 1.0);
  EXPECT_EQ(doc["aggregate"], "Accepted");
  EXPECT_TRUE(doc.contains("latency_ms"));

  auto [ce, bad] = svc.handle_judge(request("p0", "int main( {", "cpp").dump());
  EXPECT_EQ(ce, 200);
  EXPECT_EQ(bad["pass_rate"], 0.0);
  EXPECT_EQ(bad["aggregate"], "CompileError");

  auto terse = request("p0", "print(3)\n");
  terse["per_case"] = false;
  terse["early_stop"] = true;
  auto [s, partial] = svc.handle_judge(terse.dump());
  EXPECT_FALSE(partial.contains("per_case"));
  EXPECT_TRUE(partial["early_stopped"].get<bool>());
}

TEST(Service, HttpRoundTripMatchesCli) {
  auto dir = store_dir("tf_store_http", 2);
  ServiceConfig cfg;
  cfg.port = 0;
  cfg.workers = 4;
  RewardService svc(cfg, engine(), std::make_shared<SuiteStore>(dir));
  const int port = svc.start();

  httplib::Client client("127.0.0.1", port);
  auto health = client.Get("/v1/health");
  ASSERT_TRUE(health);
  EXPECT_EQ(json::parse(health->body)["problems"], 2);

  const std::string wrong = "a, b = map(int, input().split())\nprint(a - b)\n";
  auto res = client.Post("/v1/judge", request("p1", wrong).dump(), "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  auto doc = json::parse(res->body);
  doc.erase("latency_ms");

  auto src = std::filesystem::temp_directory_path() / "tf_wrong.py";
  std::ofstream(src) << wrong;
  int status = 0;
  auto out = run_command(std::string(TESTFORGE_CLI) + " judge --suite " + (dir / "p1.json").string() +
                             " --solution " + src.string() + " --lang python3",
                         &status);
  EXPECT_EQ(WEXITSTATUS(status), 1);  // not accepted
  EXPECT_EQ(json::parse(out), doc);

  auto missing = client.Post("/v1/judge", request("zz", wrong).dump(), "application/json");
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 404);
  auto malformed = client.Post("/v1/judge", "[]", "application/json");
  ASSERT_TRUE(malformed);
  EXPECT_EQ(malformed->status, 400);
  svc.stop();
}

TEST(Cli, ExitCodes) {
  int status = 0;
  run_command(std::string(TESTFORGE_CLI) + " 2>/dev/null", &status);
  EXPECT_EQ(WEXITSTATUS(status), 2);
  run_command(std::string(TESTFORGE_CLI) + " frobnicate 2>/dev/null", &status);
  EXPECT_EQ(WEXITSTATUS(status), 2);
  auto dir = store_dir("tf_store_cli", 1);
  auto src = std::filesystem::temp_directory_path() / "tf_right.py";
  std::ofstream(src) << kSum;
  auto out = run_command(std::string(TESTFORGE_CLI) + " judge --suite " + (dir / "p0.json").string() +
                             " --solution " + src.string() + " --lang python3",
                         &status);
  EXPECT_EQ(WEXITSTATUS(status), 0);
  EXPECT_EQ(json::parse(out)["pass_rate"], 1.0);
  run_command(std::string(TESTFORGE_CLI) + " judge --suite " + (dir / "p0.json").string() +
                  " --solution " + src.string() + " --lang klingon 2>/dev/null",
              &status);
  EXPECT_EQ(WEXITSTATUS(status), 2);
}

#include <gtest/gtest.h>

#include <httplib.h>

#include <atomic>
#include <mutex>
#include <sstream>
#include <thread>

#include "itrace/cli/commands.hpp"
#include "itrace/session_io.hpp"
#include "support/support.hpp"

using namespace itrace;
using testing_support::TempDir;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

/// String sink safe to read while another thread writes.
class LockedBuf : public std::stringbuf {
 public:
  std::string text() {
    std::lock_guard lock(mu_);
    return str();
  }

 protected:
  std::streamsize xsputn(const char* s, std::streamsize n) override {
    std::lock_guard lock(mu_);
    return std::stringbuf::xsputn(s, n);
  }
  int_type overflow(int_type c) override {
    std::lock_guard lock(mu_);
    return std::stringbuf::overflow(c);
  }

 private:
  std::recursive_mutex mu_;
};

void write_session_file(const fs::path& p, std::vector<GazePoint> pts, const std::string& user = "u1",
                        const std::string& video = "clip.mp4") {
  testing_support::spit(p, write_session(testing_support::simple_session(std::move(pts), user, video)));
}

}  // namespace

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, cli::kExitUsage);
  EXPECT_EQ(run({"bogus"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"render", "/nonexistent.mp4", "/nonexistent.json"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"simulate", "--method", "telepathy"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"--help"}).code, cli::kExitOk);
}

TEST(Cli, InvalidSessionIsUsageError) {
  TempDir tmp;
  testing_support::write_pattern_folder(tmp / "clip", {32, 18}, 10, 5);
  testing_support::spit(tmp / "bad.json", "{\"schema_version\": 1");
  const auto r = run({"render", (tmp / "clip").string(), (tmp / "bad.json").string(), "--out", (tmp / "o").string()});
  EXPECT_EQ(r.code, cli::kExitUsage);
  EXPECT_FALSE(r.err.empty());
}

TEST(Cli, RenderFrameCount) {
  TempDir tmp;
  testing_support::write_pattern_video(tmp / "clip.mp4", {64, 36}, 30, 300);
  write_session_file(tmp / "g.json", {{0.5, 0.5, 0.2}, {0.5, 0.5, 7.0}});
  const auto r = run({"render", (tmp / "clip.mp4").string(), (tmp / "g.json").string(), "--out",
                      (tmp / "o").string(), "--fps", "10", "--fade", "0.3", "--json", "--frames"});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["heat_frames"], 100);
  EXPECT_EQ(j["hold_frames"], 30);
  EXPECT_EQ(j["frames"], 130);
  EXPECT_TRUE(fs::is_directory(j["heatmap"].get<std::string>()));
  EXPECT_EQ(run({"render", (tmp / "clip.mp4").string(), (tmp / "g.json").string(), "--out", (tmp / "o").string(),
                 "--fade", "-1"})
                .code,
            cli::kExitUsage);
}

TEST(Cli, RenderProcessingFailureIsOne) {
  TempDir tmp;
  testing_support::spit(tmp / "clip.mp4", "not a video at all");
  write_session_file(tmp / "g.json", {{0.5, 0.5, 0.2}});
  EXPECT_EQ(run({"render", (tmp / "clip.mp4").string(), (tmp / "g.json").string(), "--out", (tmp / "o").string()})
                .code,
            cli::kExitFailure);
}

TEST(Cli, DebugDumpIsAdditive) {
  TempDir tmp;
  testing_support::write_pattern_folder(tmp / "clip", {64, 36}, 10, 10);
  testing_support::Gen gen(77);
  const auto a = gen.points(15, 1.0);
  const auto b = gen.points(15, 1.0);
  auto ab = a;
  ab.insert(ab.end(), b.begin(), b.end());
  std::stable_sort(ab.begin(), ab.end(), [](const auto& x, const auto& y) { return x.t < y.t; });
  auto sorted = [](std::vector<GazePoint> v) {
    std::stable_sort(v.begin(), v.end(), [](const auto& x, const auto& y) { return x.t < y.t; });
    return v;
  };
  write_session_file(tmp / "a.json", sorted(a));
  write_session_file(tmp / "b.json", sorted(b));
  write_session_file(tmp / "ab.json", ab);
  std::map<std::string, std::map<std::pair<int, int>, double>> cells;
  for (const std::string name : {"a", "b", "ab"}) {
    const auto dump = tmp / (name + ".dump.json");
    const auto r = run({"render", (tmp / "clip").string(), (tmp / (name + ".json")).string(), "--out",
                        (tmp / "o").string(), "--frames", "--hold_seconds", "0", "--debug-dump", dump.string()});
    ASSERT_EQ(r.code, cli::kExitOk) << r.err;
    const auto j = json::parse(testing_support::slurp(dump));
    EXPECT_EQ(j["width"], 64);
    for (const auto& c : j["cumulative_raw"]["cells"]) cells[name][{c["x"], c["y"]}] = c["v"];
  }
  for (const auto& [k, v] : cells["ab"]) {
    const double expect = cells["a"][k] + cells["b"][k];
    EXPECT_NEAR(v, expect, 1e-9);
  }
  double total_a = 0, total_b = 0, total_ab = 0;
  for (const auto& [k, v] : cells["a"]) total_a += v;
  for (const auto& [k, v] : cells["b"]) total_b += v;
  for (const auto& [k, v] : cells["ab"]) total_ab += v;
  EXPECT_NEAR(total_ab, total_a + total_b, 1e-9);
}

TEST(Cli, AverageFolderRules) {
  TempDir tmp;
  fs::create_directories(tmp / "none");
  write_session_file(tmp / "none" / "a.json", {{0.5, 0.5, 0.1}});
  EXPECT_EQ(run({"average", (tmp / "none").string()}).code, cli::kExitUsage);

  fs::create_directories(tmp / "two");
  testing_support::write_pattern_video(tmp / "two" / "x.mp4", {32, 18}, 10, 3);
  testing_support::write_pattern_video(tmp / "two" / "y.mp4", {32, 18}, 10, 3);
  write_session_file(tmp / "two" / "a.json", {{0.5, 0.5, 0.1}});
  EXPECT_EQ(run({"average", (tmp / "two").string()}).code, cli::kExitUsage);

  fs::create_directories(tmp / "mixed");
  testing_support::write_pattern_video(tmp / "mixed" / "clip.mp4", {32, 18}, 10, 3);
  write_session_file(tmp / "mixed" / "a.json", {{0.5, 0.5, 0.1}}, "a", "clip.mp4");
  write_session_file(tmp / "mixed" / "b.json", {{0.5, 0.5, 0.1}}, "b", "other.mp4");
  const auto mixed = run({"average", (tmp / "mixed").string()});
  EXPECT_EQ(mixed.code, cli::kExitUsage);
  EXPECT_NE(mixed.err.find("other.mp4"), std::string::npos) << mixed.err;

  fs::create_directories(tmp / "ok");
  testing_support::write_pattern_video(tmp / "ok" / "clip.mp4", {32, 18}, 10, 5);
  write_session_file(tmp / "ok" / "a.json", {{0.5, 0.5, 0.1}}, "a");
  write_session_file(tmp / "ok" / "b.json", {{0.2, 0.5, 0.3}, {0.4, 0.4, 0.4}}, "b");
  testing_support::spit(tmp / "ok" / "b.json.sim.json", "{}");
  const auto r = run({"average", (tmp / "ok").string(), "--out", (tmp / "o").string(), "--json"});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["points"], 3);
  EXPECT_EQ(fs::path(j["heatmap"].get<std::string>()).filename(), "clip_avg_heatmap.mp4");
}

TEST(Cli, DuplicateSessionBrightensCumulativeFrame) {
  TempDir tmp;
  double peak[2] = {0, 0};
  for (int copies = 1; copies <= 2; ++copies) {
    const auto dir = tmp / std::to_string(copies);
    fs::create_directories(dir);
    testing_support::write_pattern_folder(dir / "clip", {64, 36}, 10, 5);
    for (int i = 0; i < copies; ++i) {
      write_session_file(dir / ("s" + std::to_string(i) + ".json"), {{0.5, 0.5, 0.2}}, "u" + std::to_string(i));
    }
    const auto dump = dir / "dump.json";
    const auto r = run({"average", dir.string(), "--out", (dir / "o").string(), "--frames", "--debug-dump",
                        dump.string()});
    ASSERT_EQ(r.code, cli::kExitOk) << r.err;
    peak[copies - 1] = json::parse(testing_support::slurp(dump))["cumulative_raw"]["max"];
  }
  EXPECT_GT(peak[1], peak[0]);
  EXPECT_DOUBLE_EQ(peak[1], 2 * peak[0]);
}

TEST(Cli, SimulateIsDeterministic) {
  TempDir tmp;
  for (const std::string m : {"turbo", "dwell", "pinch"}) {
    const auto a = tmp / (m + "_a.json");
    const auto b = tmp / (m + "_b.json");
    ASSERT_EQ(run({"simulate", "--method", m, "--seed", "5", "--duration", "20", "--out", a.string()}).code, 0);
    ASSERT_EQ(run({"simulate", "--method", m, "--seed", "5", "--duration", "20", "--out", b.string()}).code, 0);
    EXPECT_EQ(testing_support::slurp(a), testing_support::slurp(b));
    EXPECT_EQ(testing_support::slurp(a.string() + ".sim.json"), testing_support::slurp(b.string() + ".sim.json"));
    const auto s = read_session(testing_support::slurp(a));
    EXPECT_EQ(s.click_method, ClickMethod::simulated);
  }
  const auto c = tmp / "c.json";
  ASSERT_EQ(run({"simulate", "--method", "turbo", "--seed", "6", "--duration", "20", "--out", c.string()}).code, 0);
  EXPECT_NE(testing_support::slurp(c), testing_support::slurp(tmp / "turbo_a.json"));
  EXPECT_EQ(run({"simulate", "--duration", "0", "--out", c.string()}).code, cli::kExitUsage);
  EXPECT_EQ(run({"simulate", "--duty", "1.5", "--out", c.string()}).code, cli::kExitUsage);
}

TEST(Cli, AnalyzeGroupsSimulatedTurboAsController) {
  TempDir tmp;
  fs::create_directories(tmp / "s");
  ASSERT_EQ(run({"simulate", "--method", "turbo", "--duration", "10", "--video-name", "lecture.mp4", "--out",
                 (tmp / "s" / "t.json").string()})
                .code,
            0);
  ASSERT_EQ(run({"simulate", "--method", "dwell", "--duration", "10", "--video-name", "lecture.mp4", "--out",
                 (tmp / "s" / "d.json").string()})
                .code,
            0);
  const auto r = run({"analyze", (tmp / "s").string(), "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_FALSE(j["summary"]["cells"]["controller/lecture.mp4"].is_null());
  EXPECT_FALSE(j["summary"]["cells"]["dwell/lecture.mp4"].is_null());
  EXPECT_EQ(j["sessions"].size(), 2u);
  EXPECT_EQ(run({"analyze", (tmp / "nothing").string()}).code, cli::kExitUsage);
  EXPECT_EQ(run({"analyze", (tmp / "s").string()}).code, 0);
}

TEST(Cli, ServeUntilStopped) {
  TempDir tmp;
  LockedBuf buf;
  std::ostream out(&buf);
  std::ostringstream err;
  std::atomic<bool> stop{false};
  int code = -1;
  std::thread t([&] {
    code = cli::run({"serve", "--host", "127.0.0.1", "--port", "0", "--discovery", "false", "--out",
                     (tmp / "o").string()},
                    out, err, &stop);
  });
  std::string text;
  for (int i = 0; i < 100 && text.find('\n') == std::string::npos; ++i) {
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
    text = buf.text();
  }
  const auto colon = text.rfind(':');
  ASSERT_NE(colon, std::string::npos) << text;
  const int port = std::stoi(text.substr(colon + 1));
  httplib::Client client("127.0.0.1", port);
  auto r = client.Get("/health");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);
  stop = true;
  t.join();
  EXPECT_EQ(code, cli::kExitOk);
  EXPECT_NE(buf.text().find("stopped"), std::string::npos);
}

TEST(Cli, ServeRejectsBadConfig) {
  EXPECT_EQ(run({"serve", "--port", "99999"}).code, cli::kExitUsage);
}

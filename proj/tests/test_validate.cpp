#include <catch_amalgamated.hpp>

#include <sstream>

#include "support.hpp"

using namespace lbp;
using namespace lbp::test;

namespace {

bool has_error(const ValidationReport& rep, const std::string& file, std::size_t line, const std::string& fragment) {
  for (const auto& d : rep.diagnostics)
    if (d.severity == Severity::Error && d.file == file && d.line == line &&
        d.message.find(fragment) != std::string::npos)
      return true;
  return false;
}

std::string frame(int id, double t, const std::string& pid = "A1") {
  return R"({"frame_id":)" + std::to_string(id) + R"(,"t":)" + std::to_string(t) + R"(,"players":[{"pid":")" + pid +
         R"(","tid":"A","x":40,"y":30}],"ball":null})" + "\n";
}

}  // namespace

TEST_CASE("clean fixture has no errors") {
  TempDir dir("valid");
  write_minimal_match(dir.path());
  const auto rep = validate_match_dir(dir.path());
  CHECK(rep.clean());
  CHECK(rep.error_count() == 0);
}

TEST_CASE("frame id regression is reported on its line") {
  TempDir dir("regress");
  write_minimal_match(dir.path());
  write_text(dir / "tracking.jsonl", frame(0, 0.0) + frame(1, 0.033) + frame(2, 0.066) + frame(1, 0.1));
  const auto rep = validate_match_dir(dir.path());
  CHECK_FALSE(rep.clean());
  CHECK(has_error(rep, "tracking.jsonl", 4, "frame_id regression"));
}

TEST_CASE("unknown tracked player is reported once") {
  TempDir dir("unknown");
  write_minimal_match(dir.path());
  write_text(dir / "tracking.jsonl", frame(0, 0.0) + frame(1, 0.033, "Z9") + frame(2, 0.066, "Z9"));
  const auto rep = validate_match_dir(dir.path());
  CHECK(has_error(rep, "tracking.jsonl", 2, "unknown player_id 'Z9'"));
  CHECK_FALSE(has_error(rep, "tracking.jsonl", 3, "unknown player_id"));
}

TEST_CASE("malformed JSON and bad events") {
  TempDir dir("malformed");
  write_minimal_match(dir.path());

  SECTION("tracking line") {
    write_text(dir / "tracking.jsonl", frame(0, 0.0) + "{\"frame_id\": 1,\n");
    CHECK(has_error(validate_match_dir(dir.path()), "tracking.jsonl", 2, "malformed JSON"));
  }
  SECTION("event not in roster") {
    write_text(dir / "events.json", R"([
 {"event_id": "e1", "type": "pass", "team_id": "A", "player_id": "A1", "receiver_id": "Q",
  "frame_id": 0, "end_frame_id": 1, "outcome": "complete"}
])");
    CHECK(has_error(validate_match_dir(dir.path()), "events.json", 2, "receiver_id 'Q'"));
  }
  SECTION("duplicate event ids") {
    write_text(dir / "events.json", R"([
 {"event_id": "e1", "type": "clearance", "team_id": "B", "player_id": "B1", "frame_id": 0},
 {"event_id": "e1", "type": "clearance", "team_id": "B", "player_id": "B1", "frame_id": 1}
])");
    CHECK(has_error(validate_match_dir(dir.path()), "events.json", 3, "duplicate event_id"));
  }
}

TEST_CASE("cmd_validate exit codes") {
  TempDir dir("cmdvalidate");
  write_minimal_match(dir / "good");
  std::ostringstream out;
  CHECK(cmd_validate(dir.path(), out) == kExitOk);
  CHECK(out.str().find("1 match(es), 0 error(s)") != std::string::npos);

  write_minimal_match(dir / "bad");
  write_text(dir / "bad" / "meta.json", "{");
  std::ostringstream out2;
  CHECK(cmd_validate(dir.path(), out2) == kExitPartialFailure);
  CHECK(out2.str().find("bad/meta.json") != std::string::npos);

  std::ostringstream out3;
  CHECK(cmd_validate(dir / "missing", out3) == kExitPartialFailure);
}

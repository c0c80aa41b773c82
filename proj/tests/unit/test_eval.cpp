#include <algorithm>
#include <filesystem>
#include <fstream>

#include "../support/docs.hpp"
#include "doctest.h"
#include "recast/error.hpp"
#include "recast/eval.hpp"

using namespace recast;
using namespace recast::testing;

namespace {

bool has(const std::vector<AttributePath>& paths, const std::string& field) {
  return std::any_of(paths.begin(), paths.end(), [&](const auto& p) { return p.field == field; });
}

DslDocument styled_bar() {
  J styles = {{"fill", {{"scale", "fix"}, {"fix", "#4C78A8"}}}};
  Dim x = slots(18, 4);
  x.start = 1;
  x.interval = 5.5;
  return build(node("0", "cartesian", cartesian(), {}, "rectangle"),
               {{"0", spec(structure_1d(18, "x"), mark("rectangle"), {{"x", x.json()}, {"y", value_sized().json()}},
                           styles)}});
}

void write(const std::filesystem::path& p, const std::string& text) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream(p) << text;
}

}  // namespace

TEST_CASE("the simple bar ground truth has 18 applicable attributes") {
  CHECK(applicable_attributes(styled_bar()).size() == 18);
}

TEST_CASE("applicability follows the ground truth's conditions") {
  const auto bar = applicable_attributes(styled_bar());
  CHECK_FALSE(has(bar, "layout_specification.y.stacking_direction"));
  CHECK_FALSE(has(bar, "layout_specification.y.subdividing"));
  CHECK(has(bar, "layout_specification.y.anchor"));
  CHECK(has(bar, "layout_specification.x.anchor_interval"));
  CHECK_FALSE(has(bar, "layout_specification.y.anchor_interval"));

  const auto pie = applicable_attributes(pie_chart());
  CHECK(has(pie, "layout_specification.angle.subdividing"));
  CHECK_FALSE(has(pie, "layout_specification.angle.stacking_direction"));
  CHECK_FALSE(has(pie, "layout_specification.angle.anchor"));
  CHECK_FALSE(has(pie, "layout_specification.x.stacking"));
}

TEST_CASE("frame kind changes the attribute count") {
  auto child = [](const std::string& kind, J frame) {
    return build(node("0", "cartesian", cartesian(), {node("0-1", kind, std::move(frame), {}, "circle")}),
                 {{"0-1", spec(structure_1d(3, "x"), mark("circle"), {{"x", slots(3, 10).json()}})}});
  };
  CHECK(applicable_attributes(child("cartesian", cartesian())).size() !=
        applicable_attributes(child("polar", polar())).size());
}

TEST_CASE("scoring") {
  const auto gt = styled_bar();
  SUBCASE("identity") {
    const auto r = score(gt, gt);
    CHECK(r.matched == 18);
    CHECK(r.mismatched == 0);
    CHECK(r.accuracy() == 100);
  }
  SUBCASE("one flipped attribute") {
    auto gen = gt;
    gen.data_specifications.at(ContainerId::root()).layout_specification.dims.at(Dimension::x).anchor_distribute =
        AnchorDistribution::flexible;
    const auto r = score(gt, gen);
    CHECK(r.matched == 17);
    REQUIRE(r.mismatches.size() == 1);
    CHECK(r.mismatches[0].path.str() == "0 . layout_specification.x.anchor_distribute");
    CHECK(r.mismatches[0].expected == "\"uniform_interval\"");
    CHECK(rounded_accuracy(r.matched, r.total()) == 94.4);
  }
  SUBCASE("inapplicable fields are ignored") {
    auto gen = gt;
    gen.data_specifications.at(ContainerId::root()).layout_specification.dims.at(Dimension::y).stacking_direction =
        StackDirection::max;
    CHECK(score(gt, gen).mismatched == 0);
  }
  SUBCASE("inactive style payloads are ignored") {
    auto gen = gt;
    auto& fill = gen.data_specifications.at(ContainerId::root()).non_layout_specification->attributes.at(StyleKey::fill);
    fill.options = std::vector<AttributeValue>{std::string("#000000")};
    CHECK(score(gt, gen).mismatched == 0);
  }
  SUBCASE("a missing dimension counts every attribute of it") {
    auto gen = gt;
    gen.data_specifications.at(ContainerId::root()).layout_specification.dims.erase(Dimension::y);
    const auto r = score(gt, gen);
    CHECK(r.mismatched == 6);
    CHECK(r.mismatches[0].actual == "<missing>");
  }
}

TEST_CASE("report arithmetic") {
  CHECK(rounded_accuracy(331, 349) == 94.8);
  CHECK(rounded_accuracy(13, 18) == 72.2);
  CHECK(rounded_accuracy(16, 19) == 84.2);
  CHECK(rounded_accuracy(0, 0) == 100.0);
}

TEST_CASE("gallery runs and CSV round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "recast_eval_gallery";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  CHECK(run_gallery(dir).cases.empty());

  const auto gt = serialize(styled_bar());
  write(dir / "a_bar" / "ground_truth.revis.json", gt);
  write(dir / "a_bar" / "generated.revis.json", gt);
  write(dir / "b_pie" / "ground_truth.revis.json", serialize(pie_chart()));
  auto wrong = pie_chart();
  wrong.data_specifications.at(ContainerId::root()).mark_specification->mark_type = MarkType::rectangle;
  write(dir / "b_pie" / "generated.revis.json", serialize(wrong));
  write(dir / "c_broken" / "ground_truth.revis.json", "{");

  const auto report = run_gallery(dir, 2);
  REQUIRE(report.cases.size() == 2);
  CHECK(report.cases[0].name == "a_bar");
  CHECK(report.cases[1].mismatched == 1);
  CHECK(report.load_errors.size() == 1);
  CHECK(run_gallery(dir, 1).cases[1].matched == report.cases[1].matched);

  const auto back = parse_report_csv(format_report_csv(report));
  REQUIRE(back.cases.size() == 2);
  CHECK(back.overall().matched == report.overall().matched);
  CHECK(back.overall().total() == report.overall().total());
  CHECK(format_report_text(report).find("overall") != std::string::npos);
  CHECK(format_report_json(report).find("\"rubric_version\": 1") != std::string::npos);
  std::filesystem::remove_all(dir);
}

#include <doctest.h>

#include <filesystem>
#include <random>

#include "fixtures.hpp"
#include "mapsparse/error.hpp"
#include "mapsparse/map_model.hpp"

using namespace mapsparse;

namespace {

// Three landmarks, two keyframes, four observations.
const char* kSmallMap = R"({
  "cameras": [{"id": 0, "fx": 100, "fy": 100, "cx": 320, "cy": 240, "width": 640, "height": 480}],
  "keyframes": [
    {"id": 1, "camera_id": 0, "q": [1, 0, 0, 0], "t": [0, 0, 0]},
    {"id": 0, "camera_id": 0, "q": [1, 0, 0, 0], "t": [0.5, 0, 0]}
  ],
  "landmarks": [
    {"id": 12, "p": [0, 0, 2], "match_count": 2},
    {"id": 10, "p": [1, 0, 2], "match_count": 1},
    {"id": 11, "p": [0, 1, 3], "match_count": 5}
  ],
  "observations": [
    {"kf": 0, "lm": 10, "u": 100, "v": 100},
    {"kf": 0, "lm": 11, "u": 110, "v": 100},
    {"kf": 1, "lm": 11, "u": 120, "v": 100},
    {"kf": 1, "lm": 12, "u": 130, "v": 100}
  ]
})";

std::string replaced(std::string text, const std::string& from, const std::string& to) {
  text.replace(text.find(from), from.size(), to);
  return text;
}

}  // namespace

TEST_CASE("load: small map gets dense indices by ascending id") {
  const Map m = parseMap(kSmallMap);
  CHECK(m.numLandmarks() == 3);
  CHECK(m.numKeyframes() == 2);
  CHECK(m.numObservations() == 4);
  CHECK(m.landmarks()[0].id == 10);
  CHECK(m.keyframes()[0].id == 0);
  CHECK(*m.landmarkIndex(12) == 2);
  CHECK_FALSE(m.landmarkIndex(99).has_value());
}

TEST_CASE("load: dangling landmark id is an integrity error citing it") {
  const auto text = replaced(kSmallMap, R"("lm": 12)", R"("lm": 99)");
  try {
    parseMap(text);
    FAIL("expected an integrity error");
  } catch (const IntegrityError& e) {
    CHECK(std::string(e.what()).find("99") != std::string::npos);
  }
}

TEST_CASE("load: duplicate observation is rejected") {
  const auto text = replaced(kSmallMap, R"({"kf": 1, "lm": 12, "u": 130, "v": 100})",
                             R"({"kf": 1, "lm": 11, "u": 130, "v": 100})");
  CHECK_THROWS_AS(parseMap(text), IntegrityError);
}

TEST_CASE("load: schema violations name the record and field") {
  const auto text = replaced(kSmallMap, R"("match_count": 5)", R"("match_count": "five")");
  try {
    parseMap(text);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("landmarks[2].match_count") != std::string::npos);
  }
  CHECK_THROWS_AS(parseMap("{"), ParseError);
  CHECK_THROWS_AS(parseMap(replaced(kSmallMap, R"("u": 100)", R"("u": 700)")), IntegrityError);
  CHECK_THROWS_AS(parseMap(replaced(kSmallMap, R"("q": [1, 0, 0, 0], "t": [0, 0, 0])",
                                    R"("q": [2, 0, 0, 0], "t": [0, 0, 0])")),
                  IntegrityError);
  CHECK_THROWS_AS(parseMap(replaced(kSmallMap, R"("camera_id": 0, "q": [1, 0, 0, 0], "t": [0.5)",
                                    R"("camera_id": 7, "q": [1, 0, 0, 0], "t": [0.5)")),
                  IntegrityError);
}

TEST_CASE("project: principal axis, offset point, behind camera") {
  const CameraModel cam{0, 100, 100, 320, 240, 640, 480};
  const Pose id;
  const auto a = project(cam, id, {0, 0, 2});
  REQUIRE(a);
  CHECK(a->x() == doctest::Approx(320));
  CHECK(a->y() == doctest::Approx(240));
  const auto b = project(cam, id, {1, 0, 2});
  REQUIRE(b);
  CHECK(b->x() == doctest::Approx(370));
  CHECK(b->y() == doctest::Approx(240));
  CHECK_FALSE(project(cam, id, {0, 0, -1}));
  CHECK_FALSE(project(cam, id, {100, 0, 1}));  // out of image
}

TEST_CASE("project is scale consistent") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const CameraModel cam{0, 400, 380, 320, 240, 640, 480};
  const Pose pose{Eigen::Quaterniond(Eigen::AngleAxisd(0.3, Eigen::Vector3d(1, 2, 3).normalized())),
                  Eigen::Vector3d(0.2, -0.1, 0.4)};
  int checked = 0;
  for (int i = 0; i < 500; ++i) {
    const Eigen::Vector3d pc(u(rng), u(rng), 1.0 + 2.0 * (u(rng) + 1.0));
    const double s = 0.2 + 3.0 * (u(rng) + 1.0);
    // Scale about the camera center so the point stays on its viewing ray.
    const Eigen::Vector3d p = pose.rotation.conjugate() * (pc - pose.translation);
    const Eigen::Vector3d ps = pose.rotation.conjugate() * (s * pc - pose.translation);
    const auto a = project(cam, pose, p);
    const auto b = project(cam, pose, ps);
    CHECK(a.has_value() == b.has_value());
    if (a && b) {
      CHECK((*a - *b).norm() < 1e-9);
      ++checked;
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("association matrix transcribes observations") {
  const Map m = parseMap(kSmallMap);
  const auto a = associationMatrix(m);
  CHECK(a.rows() == 2);
  CHECK(a.cols() == 3);
  CHECK(a.nnz() == m.numObservations());
  // kf0 sees lm10, lm11; kf1 sees lm11, lm12.
  CHECK(a == BinaryMatrix::fromRows(3, {{0, 1}, {1, 2}}));

  const Map empty = Map::build({CameraModel{0, 100, 100, 320, 240, 640, 480}},
                               {Keyframe{0, 0, {}}}, {Landmark{1, {0, 0, 1}, 0}}, {});
  const auto z = associationMatrix(empty);
  CHECK(z.rows() == 1);
  CHECK(z.nnz() == 0);
}

TEST_CASE("column sums of A equal per-landmark observation counts") {
  const Map m = fixtures::ringScene(5, 120, 9);
  const auto counts = associationMatrix(m).columnCounts();
  for (std::size_t j = 0; j < m.numLandmarks(); ++j) {
    CHECK(counts[j] == m.observationsOfLandmark(j).size());
  }
}

TEST_CASE("save/load round trip is structurally identical") {
  const Map m = fixtures::ringScene(8, 60, 6).withMetadata({{"note", "round trip"}});
  const auto path = std::filesystem::temp_directory_path() / "mapsparse_roundtrip.json";
  saveMap(m, path);
  const Map back = loadMap(path);
  CHECK(sameStructure(m, back));
  CHECK(back.metadata().at("note") == "round trip");
  CHECK(serializeMap(back) == serializeMap(m));
  std::filesystem::remove(path);
  CHECK_THROWS_AS(loadMap(path), IoError);
}

TEST_CASE("subset keeps ids, keyframes and only selected observations") {
  const Map m = fixtures::ringScene(2, 40, 5);
  std::vector<std::uint8_t> sel(m.numLandmarks(), 0);
  for (std::size_t j = 0; j < sel.size(); j += 3) sel[j] = 1;
  const Map s = m.subset(sel, {});
  CHECK(s.numKeyframes() == m.numKeyframes());
  std::size_t expected_obs = 0;
  for (std::size_t j = 0; j < sel.size(); ++j) {
    if (sel[j]) expected_obs += m.observationsOfLandmark(j).size();
  }
  CHECK(s.numObservations() == expected_obs);
  for (const auto& lm : s.landmarks()) {
    const auto idx = m.landmarkIndex(lm.id);
    REQUIRE(idx);
    CHECK(sel[*idx] == 1);
  }
}

#include "fixtures.hpp"

#include <cmath>
#include <numbers>

namespace fixtures {

using mapsparse::BinaryMatrix;
using mapsparse::ConstraintBlock;
using mapsparse::SlackKind;
using mapsparse::SparsificationProblem;
using mapsparse::Variant;

mapsparse::Map ringScene(std::uint64_t seed, std::size_t landmarks,
                         std::size_t keyframes, double density) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> coin(0.0, 1.0);

  mapsparse::CameraModel cam{1, 50.0, 50.0, 32.0, 24.0, 64, 48};
  std::vector<mapsparse::Keyframe> kfs;
  for (std::size_t k = 0; k < keyframes; ++k) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(k) /
                     static_cast<double>(keyframes);
    const Eigen::Vector3d center(4.0 * std::cos(a), 4.0 * std::sin(a),
                                 0.3 * unit(rng));
    kfs.push_back({static_cast<mapsparse::KeyframeId>(10 + k), 1,
                   mapsparse::Pose::lookAt(center, Eigen::Vector3d::Zero())});
  }
  std::vector<mapsparse::Landmark> lms;
  for (std::size_t i = 0; i < landmarks; ++i) {
    lms.push_back({static_cast<mapsparse::LandmarkId>(100 + i),
                   Eigen::Vector3d(unit(rng), unit(rng), 0.5 * unit(rng)), 0});
  }
  std::vector<mapsparse::Observation> obs;
  for (const auto& kf : kfs) {
    for (auto& lm : lms) {
      const auto px = mapsparse::project(cam, kf.pose, lm.position);
      if (px && coin(rng) < density) {
        obs.push_back({kf.id, lm.id, *px});
        ++lm.match_count;
      }
    }
  }
  for (auto& lm : lms) {
    lm.match_count += static_cast<std::int64_t>(rng() % 4);
    if (lm.match_count == 0) lm.match_count = 1;
  }
  return mapsparse::Map::build({cam}, std::move(kfs), std::move(lms),
                               std::move(obs));
}

SparsificationProblem threeLandmarkProblem() {
  SparsificationProblem p;
  p.n = 3;
  p.weight = {1.0, 1.0, 1.0};
  p.variant = Variant::kLP;
  p.landmark_ids = {0, 1, 2};
  ConstraintBlock a;
  a.name = "A";
  a.matrix = BinaryMatrix::fromRows(3, {{0, 1}, {1, 2}});
  a.rhs = {1, 1};
  a.penalty = 10.0;
  a.row_names = {"a_0", "a_1"};
  p.blocks.push_back(std::move(a));
  return p;
}

namespace {

ConstraintBlock randomBlock(std::mt19937_64& rng, std::size_t n, std::size_t rows,
                            const char* name, std::int32_t max_rhs, double penalty,
                            SlackKind kind, double density) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<std::vector<std::uint32_t>> pattern(rows);
  for (auto& row : pattern) {
    for (std::size_t j = 0; j < n; ++j) {
      if (coin(rng) < density) row.push_back(static_cast<std::uint32_t>(j));
    }
  }
  ConstraintBlock b;
  b.name = name;
  b.matrix = BinaryMatrix::fromRows(n, std::move(pattern));
  for (std::size_t r = 0; r < rows; ++r) {
    b.rhs.push_back(kind == SlackKind::kBinary
                        ? 1
                        : 1 + static_cast<std::int32_t>(rng() % max_rhs));
    std::string lower(name);
    lower[0] = static_cast<char>(std::tolower(lower[0]));
    b.row_names.push_back(lower + "_" + std::to_string(r));
  }
  b.penalty = penalty;
  b.slack_kind = kind;
  return b;
}

}  // namespace

SparsificationProblem randomProblem(std::mt19937_64& rng, std::size_t n,
                                    std::size_t m, Variant variant) {
  std::uniform_real_distribution<double> w(0.05, 1.0);
  std::uniform_real_distribution<double> pen(0.1, 2.0);
  SparsificationProblem p;
  p.n = n;
  p.variant = variant;
  for (std::size_t j = 0; j < n; ++j) {
    p.weight.push_back(w(rng));
    p.landmark_ids.push_back(static_cast<mapsparse::LandmarkId>(j));
  }
  if (variant == Variant::kDI) {
    p.blocks.push_back(randomBlock(rng, n, 2 * m, "D", 3, pen(rng),
                                   SlackKind::kBoundedInteger, 0.3));
    return p;
  }
  p.blocks.push_back(randomBlock(rng, n, m, "A", static_cast<std::int32_t>(n / 2),
                                 pen(rng), SlackKind::kBoundedInteger, 0.6));
  if (variant == Variant::kOurs2D || variant == Variant::kOurs3D) {
    p.blocks.push_back(randomBlock(rng, n, 2 * m, "B", 1, 0.3 * pen(rng),
                                   SlackKind::kBinary, 0.25));
  }
  if (variant == Variant::kOurs3D) {
    p.blocks.push_back(randomBlock(rng, n, m, "C", 4, 0.5 * pen(rng),
                                   SlackKind::kBoundedInteger, 0.5));
  }
  return p;
}

mapsparse::MethodParams smallParams(Variant variant) {
  mapsparse::MethodParams params;
  params.variant = variant;
  params.k1 = 3;
  params.k2 = 2;
  params.grid2d = {2, 2};
  if (variant == Variant::kOurs3D) {
    params.grid3d = mapsparse::Grid3DParams{1.0, std::nullopt, 2'000'000};
  }
  return params;
}

}  // namespace fixtures

#include <doctest.h>

#include <cmath>
#include <random>

#include "frnav/region_gen.hpp"

using namespace frnav;

namespace {

std::mt19937_64 rng(4242);
double uni(double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  return d(rng);
}

PointCloud cloud_of(std::vector<Vec2> pts) {
  PointCloud c;
  c.points = std::move(pts);
  return c;
}

double forward_extent(const ConvexRegion& region, const UnitDirection& e) {
  LinearProgram lp;
  lp.c.resize(2);
  lp.c << e.x(), e.y();
  lp.C.resize(region.size(), 2);
  lp.d.resize(region.size());
  for (int i = 0; i < region.size(); ++i) {
    lp.C.row(i) = region.halfspaces[i].normal.transpose();
    lp.d[i] = region.halfspaces[i].offset;
  }
  const SolveReport rep = solve_lp(lp);
  REQUIRE(rep.status == SolveStatus::optimal);
  return lp.c.dot(rep.solution);
}

}  // namespace

TEST_SUITE_BEGIN("region_gen");

TEST_CASE("obstacle selection") {
  const UnitDirection e(Vec2(1.0, 0.0));
  SUBCASE("closest to the forward ray") {
    const PointCloud c = cloud_of({Vec2(2, 0.5), Vec2(1, -2), Vec2(-3, 0)});
    CHECK(select_obstacle(c, Vec2(0, 0), e) == 0);
  }
  SUBCASE("all behind: nearest to the center") {
    const PointCloud c = cloud_of({Vec2(-1, 0), Vec2(-2, 1)});
    CHECK(select_obstacle(c, Vec2(0, 0), e) == 0);
  }
  SUBCASE("single point") {
    const PointCloud c = cloud_of({Vec2(0.5, 3.0)});
    CHECK(select_obstacle(c, Vec2(0, 0), e) == 0);
  }
}

TEST_CASE("hyperplane QP worked examples") {
  RegionGenConfig cfg;
  SUBCASE("point-like robot, identity Q") {
    cfg.lambda = 1.0;
    cfg.epsilon = 1e-4;
    const ConvexBody tiny = ConvexBody::rectangle(0.002, 0.002);
    std::vector<Vec2> wv;
    for (const Vec2& v : tiny.vertices()) wv.push_back(v);
    const auto hp = compute_hyperplane(Vec2(2, 0), Vec2(0, 0), wv,
                                       UnitDirection(Vec2(1, 0)), cfg);
    REQUIRE(hp.has_value());
    CHECK(hp->normal.x() == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(hp->normal.y() == doctest::Approx(0.0).epsilon(1e-6));
    // Halfspace 0.5 x <= 1, i.e. x <= 2.
    CHECK(hp->offset == doctest::Approx(1.0).epsilon(1e-6));
  }
  SUBCASE("square robot, forward obstacle") {
    cfg.lambda = 0.1;
    cfg.epsilon = 0.01;
    const ConvexBody sq = ConvexBody::rectangle(0.4, 0.4);
    std::vector<Vec2> wv;
    for (const Vec2& v : sq.vertices()) wv.push_back(v);
    const auto hp = compute_hyperplane(Vec2(1, 0), Vec2(0, 0), wv,
                                       UnitDirection(Vec2(1, 0)), cfg);
    REQUIRE(hp.has_value());
    CHECK(hp->normal.x() == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(hp->normal.y() == doctest::Approx(0.0).epsilon(1e-8));
    CHECK(hp->offset == doctest::Approx(1.0).epsilon(1e-6));
  }
  SUBCASE("square robot, lateral obstacle") {
    cfg.lambda = 0.1;
    cfg.epsilon = 0.01;
    const ConvexBody sq = ConvexBody::rectangle(0.4, 0.4);
    std::vector<Vec2> wv;
    for (const Vec2& v : sq.vertices()) wv.push_back(v);
    const auto hp = compute_hyperplane(Vec2(0, 1), Vec2(0, 0), wv,
                                       UnitDirection(Vec2(1, 0)), cfg);
    REQUIRE(hp.has_value());
    CHECK(hp->normal.x() == doctest::Approx(0.0).epsilon(1e-8));
    CHECK(hp->normal.y() == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(hp->offset == doctest::Approx(1.0).epsilon(1e-6));
  }
  SUBCASE("obstacle inside the hull is infeasible") {
    const ConvexBody sq = ConvexBody::rectangle(0.4, 0.4);
    std::vector<Vec2> wv;
    for (const Vec2& v : sq.vertices()) wv.push_back(v);
    CHECK(!compute_hyperplane(Vec2(0.05, 0.05), Vec2(0, 0), wv,
                              UnitDirection(Vec2(1, 0)), cfg)
               .has_value());
  }
}

TEST_CASE("generate_region worked examples") {
  RegionGenConfig cfg;
  const ConvexBody sq = ConvexBody::rectangle(0.4, 0.4);
  const UnitDirection e(Vec2(1, 0));

  SUBCASE("empty cloud keeps only the sensor box") {
    const RegionResult rr =
        generate_region(PointCloud{}, Vec2(0, 0), 0.0, sq, e, cfg);
    REQUIRE(rr.status == RegionStatus::ok);
    CHECK(rr.region.size() == 4);
  }
  SUBCASE("single point: box plus one separating hyperplane") {
    const RegionResult rr = generate_region(cloud_of({Vec2(2, 0)}), Vec2(0, 0),
                                            0.0, sq, e, cfg);
    REQUIRE(rr.status == RegionStatus::ok);
    REQUIRE(rr.region.size() == 5);
    const Halfspace& hp = rr.region.halfspaces[4];
    // The point is separated and its x-intercept is at most 2.
    CHECK(hp.normal.dot(Vec2(2, 0)) >= hp.offset - 1e-9);
    CHECK(hp.offset / hp.normal.x() <= 2.0 + 1e-9);
    // Robot contained.
    CHECK(halfspace_violation(rr.region, sq, Pose{Vec2(0, 0), 0.0}).worst <=
          -cfg.epsilon / hp.normal.norm() + 1e-9);
  }
  SUBCASE("dense ring: all separated, robot contained, region within ring") {
    std::vector<Vec2> pts;
    for (int i = 0; i < 360; ++i) {
      const double a = -M_PI + 2.0 * M_PI * i / 360.0;
      pts.emplace_back(1.5 * std::cos(a), 1.5 * std::sin(a));
    }
    const RegionResult rr =
        generate_region(cloud_of(pts), Vec2(0, 0), 0.0, sq, e, cfg);
    REQUIRE(rr.status == RegionStatus::ok);
    for (const Vec2& p : pts) {
      bool separated = false;
      for (const Halfspace& h : rr.region.halfspaces) {
        if (h.normal.dot(p) >= h.offset - 1e-9) separated = true;
      }
      CHECK(separated);
    }
    CHECK(halfspace_violation(rr.region, sq, Pose{Vec2(0, 0), 0.0}).worst <= 0.0);
    for (const Vec2& v : region_vertices(rr.region)) {
      CHECK(v.norm() <= 1.5 + 0.05);
    }
  }
}

TEST_CASE("separation, containment and monotone pruning on random clouds") {
  RegionGenConfig cfg;
  const ConvexBody body = ConvexBody::rectangle(0.6, 0.4);
  int generated = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const Vec2 p1(uni(-0.5, 0.5), uni(-0.5, 0.5));
    const double heading = uni(-3.0, 3.0);
    const UnitDirection e = UnitDirection::from_angle(uni(-M_PI, M_PI));
    std::vector<Vec2> pts;
    const int np = 1 + static_cast<int>(rng() % 40);
    for (int i = 0; i < np; ++i) {
      const double a = uni(-M_PI, M_PI);
      const double r = uni(0.9, 4.5);
      pts.push_back(p1 + r * Vec2(std::cos(a), std::sin(a)));
    }
    const RegionResult rr =
        generate_region(cloud_of(pts), p1, heading, body, e, cfg);
    if (rr.status != RegionStatus::ok) continue;
    ++generated;

    for (const Vec2& p : pts) {
      bool separated = false;
      for (const Halfspace& h : rr.region.halfspaces) {
        if (h.normal.dot(p) >= h.offset - 1e-9) separated = true;
      }
      CHECK(separated);
    }
    double max_norm = 0.0;
    for (const Halfspace& h : rr.region.halfspaces) {
      max_norm = std::max(max_norm, h.normal.norm());
    }
    CHECK(halfspace_violation(rr.region, body, Pose{p1, heading}).worst <=
          -cfg.epsilon / max_norm + 1e-9);

    int prev = pts.size() + 1;
    for (const RegionGenIterate& it : rr.trace.iterations) {
      CHECK(it.survivors < prev);
      prev = it.survivors;
    }
  }
  CHECK(generated > 150);  // the clearance band keeps most trials feasible
}

TEST_CASE("direction bias preserves forward extent on the symmetric pair") {
  const ConvexBody sq = ConvexBody::rectangle(0.4, 0.4);
  const UnitDirection e(Vec2(1, 0));
  const PointCloud pair = cloud_of({Vec2(2, 0.9), Vec2(2, -0.9)});

  RegionGenConfig biased;
  biased.lambda = 0.1;
  RegionGenConfig isotropic;
  isotropic.lambda = 1.0;

  const RegionResult a = generate_region(pair, Vec2(0, 0), 0.0, sq, e, biased);
  const RegionResult b = generate_region(pair, Vec2(0, 0), 0.0, sq, e, isotropic);
  REQUIRE(a.status == RegionStatus::ok);
  REQUIRE(b.status == RegionStatus::ok);
  CHECK(forward_extent(a.region, e) >= forward_extent(b.region, e) - 1e-9);
}

TEST_CASE("in-collision cloud point aborts the region") {
  RegionGenConfig cfg;
  const ConvexBody sq = ConvexBody::rectangle(0.6, 0.4);
  const RegionResult rr = generate_region(cloud_of({Vec2(0.1, 0.05)}),
                                          Vec2(0, 0), 0.0, sq,
                                          UnitDirection(Vec2(1, 0)), cfg);
  CHECK(rr.status == RegionStatus::in_collision);
}

TEST_CASE("silhouette guard covers the wedge beside a range jump") {
  // Two cloud points one beam step apart with a large range jump: the
  // hyperplane through the near point must also exclude the ghost wedge.
  RegionGenConfig cfg;
  cfg.beam_step = 2.0 * M_PI / 360.0;
  const ConvexBody sq = ConvexBody::rectangle(0.4, 0.4);
  const UnitDirection e(Vec2(1, 0));
  const double step = cfg.beam_step;
  const Vec2 near_pt = 1.2 * Vec2(std::cos(0.3), std::sin(0.3));
  const Vec2 far_pt = 4.0 * Vec2(std::cos(0.3 + step), std::sin(0.3 + step));
  const RegionResult rr =
      generate_region(cloud_of({near_pt, far_pt}), Vec2(0, 0), 0.0, sq, e, cfg);
  REQUIRE(rr.status == RegionStatus::ok);
  // The ghost at the neighbor azimuth, same range, must lie outside.
  const Vec2 ghost = 1.2 * Vec2(std::cos(0.3 + step), std::sin(0.3 + step));
  bool excluded = false;
  for (const Halfspace& h : rr.region.halfspaces) {
    if (h.normal.dot(ghost) >= h.offset - 1e-9) excluded = true;
  }
  CHECK(excluded);
}

TEST_SUITE_END();

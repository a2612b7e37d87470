#include "gcl/serialize.hpp"

#include "gcl/errors.hpp"
#include "support.hpp"

#include <doctest.h>

#include <random>

using namespace gcl;

TEST_CASE("doubles print with 17 significant digits") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(kInf) == "inf");
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng);
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("csv tables") {
  CsvTable t({"name", "value", "flag"});
  CsvTable::Row r;
  r << std::string("a,b") << 0.5 << true;
  t.add(std::move(r));
  CHECK(t.str() == "name,value,flag\n\"a,b\",0.5,1\n");
  CsvTable::Row short_row;
  short_row << 1.0;
  CHECK_THROWS(t.add(std::move(short_row)));
}

TEST_CASE("planar bodies round-trip through JSON") {
  std::mt19937_64 rng(5);
  Eigen::Matrix2d form;
  form << 1.3, 0.2, 0.2, 0.4;
  std::vector<Body2D> bodies = {Body2D::full_plane(), Body2D::strip(0.3, 0.7), Body2D::ellipse(form),
                                Body2D::intersection(Body2D::strip(1.0, 0.2), Body2D::ellipse(form))};
  for (int i = 0; i < 20; ++i) bodies.push_back(testing::random_symmetric_polygon(rng));
  for (const auto& b : bodies) {
    const Json j = Json::parse(to_json(b).dump());
    CHECK(body2d_from_json(j, "body") == b);
  }
}

TEST_CASE("n-dimensional bodies round-trip through JSON") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(3, 3);
  a(0, 1) = a(1, 0) = 0.3;
  const BodyND body = BodyND::intersection(BodyND::slabs(3, {{Eigen::Vector3d(1, 2, 0.5), 0.8}}), BodyND::ellipsoid(a));
  const BodyND back = bodynd_from_json(Json::parse(to_json(body).dump()), 3, "k1");
  const Eigen::VectorXd u = Eigen::Vector3d(0.2, -0.5, 0.7).normalized();
  CHECK(back.radial_extent(u) == body.radial_extent(u));
}

TEST_CASE("parse errors name the offending key") {
  auto key_of = [](auto&& f) {
    try {
      f();
    } catch (const ConfigError& e) {
      return e.key();
    }
    return std::string("none");
  };
  CHECK(key_of([] { body2d_from_json(Json::parse(R"({"type": "strip", "half_width": 1})"), "k1"); }) ==
        "k1.normal_angle");
  CHECK(key_of([] { body2d_from_json(Json::parse(R"({"type": "blob"})"), "k2"); }) == "k2.type");
  CHECK(key_of([] { body2d_from_json(Json::parse(R"({"type": "strip", "normal_angle": 0, "half_width": -1})"), "k1"); }) ==
        "k1");
  CHECK(key_of([] { bodynd_from_json(Json::parse(R"({"slabs": [{"normal": [1, 0]}]})"), 2, "k1"); }) ==
        "k1.slabs[0].halfwidth");
  CHECK(key_of([] { bodynd_from_json(Json::parse(R"({"ellipsoid": [[1, 0], [0, 1]]})"), 3, "k2"); }) == "k2.ellipsoid");
}

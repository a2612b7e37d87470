#include "gcl/serialize.hpp"

#include "gcl/errors.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace gcl {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvTable::Row& CsvTable::Row::operator<<(double v) {
  cells_.push_back(format_double(v));
  return *this;
}
CsvTable::Row& CsvTable::Row::operator<<(int v) {
  cells_.push_back(std::to_string(v));
  return *this;
}
CsvTable::Row& CsvTable::Row::operator<<(std::size_t v) {
  cells_.push_back(std::to_string(v));
  return *this;
}
CsvTable::Row& CsvTable::Row::operator<<(bool v) {
  cells_.push_back(v ? "1" : "0");
  return *this;
}
CsvTable::Row& CsvTable::Row::operator<<(const std::string& v) {
  // Cells are plain identifiers; quote only if needed.
  if (v.find_first_of(",\"\n") == std::string::npos) {
    cells_.push_back(v);
  } else {
    std::string q = "\"";
    for (char c : v) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    cells_.push_back(q + "\"");
  }
  return *this;
}

void CsvTable::add(Row row) {
  if (row.cells_.size() != columns_.size()) throw std::logic_error("csv row width does not match the header");
  rows_.push_back(std::move(row.cells_));
}

std::string CsvTable::str() const {
  std::ostringstream out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  line(columns_);
  for (const auto& r : rows_) line(r);
  return out.str();
}

// ---------------------------------------------------------------- JSON

namespace {

const Json& member(const Json& j, const char* name, const std::string& key) {
  if (!j.is_object() || !j.contains(name)) throw ConfigError(key + "." + name, "missing");
  return j.at(name);
}

double number(const Json& j, const std::string& key) {
  if (!j.is_number()) throw ConfigError(key, "expected a number");
  return j.get<double>();
}

Eigen::VectorXd vector_of(const Json& j, const std::string& key) {
  if (!j.is_array() || j.empty()) throw ConfigError(key, "expected a non-empty array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = number(j[i], key);
  return v;
}

Eigen::MatrixXd matrix_of(const Json& j, const std::string& key) {
  if (!j.is_array() || j.empty()) throw ConfigError(key, "expected a square matrix");
  const auto n = static_cast<Eigen::Index>(j.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const Eigen::VectorXd row = vector_of(j[static_cast<std::size_t>(r)], key);
    if (row.size() != n) throw ConfigError(key, "expected a square matrix");
    m.row(r) = row.transpose();
  }
  return m;
}

Json vector_json(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Json matrix_json(const Eigen::MatrixXd& m) {
  Json a = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) a.push_back(vector_json(m.row(r).transpose()));
  return a;
}

// Library validation errors become configuration errors at the given key.
template <class F>
auto validated(const std::string& key, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(key, e.what());
  }
}

}  // namespace

Json to_json(const Body2D& body) {
  return std::visit(
      [](const auto& k) -> Json {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, FullPlane>) {
          return {{"type", "full_plane"}};
        } else if constexpr (std::is_same_v<K, Polygon>) {
          Json v = Json::array();
          for (const auto& p : k.vertices) v.push_back({p.x(), p.y()});
          return {{"type", "polygon"}, {"vertices", v}};
        } else if constexpr (std::is_same_v<K, Strip>) {
          return {{"type", "strip"}, {"normal_angle", k.normal_angle}, {"half_width", k.half_width}};
        } else if constexpr (std::is_same_v<K, Ellipse>) {
          return {{"type", "ellipse"}, {"form", matrix_json(k.form)}};
        } else {
          return {{"type", "intersection"}, {"first", to_json(*k.first)}, {"second", to_json(*k.second)}};
        }
      },
      body.kind());
}

Body2D body2d_from_json(const Json& j, const std::string& key) {
  const Json& type = member(j, "type", key);
  if (!type.is_string()) throw ConfigError(key + ".type", "expected a string");
  const std::string t = type.get<std::string>();
  return validated(key, [&]() -> Body2D {
    if (t == "full_plane") return Body2D::full_plane();
    if (t == "strip")
      return Body2D::strip(number(member(j, "normal_angle", key), key + ".normal_angle"),
                           number(member(j, "half_width", key), key + ".half_width"));
    if (t == "ellipse") {
      const Eigen::MatrixXd m = matrix_of(member(j, "form", key), key + ".form");
      if (m.rows() != 2) throw ConfigError(key + ".form", "expected a 2x2 matrix");
      return Body2D::ellipse(Eigen::Matrix2d(m));
    }
    if (t == "polygon" || t == "symmetric_polygon") {
      const char* name = t == "polygon" ? "vertices" : "half";
      const Json& pts = member(j, name, key);
      if (!pts.is_array()) throw ConfigError(key + "." + name, "expected an array of points");
      std::vector<Eigen::Vector2d> v;
      for (const auto& p : pts) {
        const Eigen::VectorXd q = vector_of(p, key + "." + name);
        if (q.size() != 2) throw ConfigError(key + "." + name, "points must have two coordinates");
        v.emplace_back(q(0), q(1));
      }
      return t == "polygon" ? Body2D::polygon(v) : Body2D::symmetric_polygon(v);
    }
    if (t == "intersection")
      return Body2D::intersection(body2d_from_json(member(j, "first", key), key + ".first"),
                                  body2d_from_json(member(j, "second", key), key + ".second"));
    throw ConfigError(key + ".type", "unknown body type '" + t + "'");
  });
}

Json to_json(const Cone2D& cone) {
  if (cone.is_full()) return {{"type", "full"}};
  return {{"center", cone.center}, {"half_angle", cone.half_angle}};
}

Cone2D cone_from_json(const Json& j, const std::string& key) {
  if (j.is_object() && j.contains("type") && j["type"] == "full") return Cone2D::full();
  return validated(key, [&] {
    return Cone2D::make(number(member(j, "center", key), key + ".center"),
                        number(member(j, "half_angle", key), key + ".half_angle"));
  });
}

Json to_json(const BodyND& body) {
  Json j = Json::object();
  j["dimension"] = body.dim();
  Json slabs = Json::array();
  for (const auto& s : body.slab_list()) slabs.push_back({{"normal", vector_json(s.normal)}, {"halfwidth", s.half_width}});
  j["slabs"] = slabs;
  Json forms = Json::array();
  for (const auto& a : body.ellipsoids()) forms.push_back(matrix_json(a));
  j["ellipsoids"] = forms;
  return j;
}

BodyND bodynd_from_json(const Json& j, int n, const std::string& key) {
  if (!j.is_object()) throw ConfigError(key, "expected an object");
  return validated(key, [&] {
    BodyND body = BodyND::whole_space(n);
    if (j.contains("slabs")) {
      const Json& list = j["slabs"];
      if (!list.is_array()) throw ConfigError(key + ".slabs", "expected an array");
      std::vector<Slab> slabs;
      for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string k = key + ".slabs[" + std::to_string(i) + "]";
        slabs.push_back({vector_of(member(list[i], "normal", k), k + ".normal"),
                         number(member(list[i], "halfwidth", k), k + ".halfwidth")});
      }
      body = BodyND::intersection(body, validated(key + ".slabs", [&] { return BodyND::slabs(n, slabs); }));
    }
    auto add_form = [&](const Json& f, const std::string& k) {
      const Eigen::MatrixXd a = matrix_of(f, k);
      if (a.rows() != n) throw ConfigError(k, "matrix size must equal the dimension");
      body = BodyND::intersection(body, validated(k, [&] { return BodyND::ellipsoid(a); }));
    };
    if (j.contains("ellipsoid")) add_form(j["ellipsoid"], key + ".ellipsoid");
    if (j.contains("ellipsoids")) {
      const Json& list = j["ellipsoids"];
      if (!list.is_array()) throw ConfigError(key + ".ellipsoids", "expected an array");
      for (std::size_t i = 0; i < list.size(); ++i) add_form(list[i], key + ".ellipsoids[" + std::to_string(i) + "]");
    }
    return body;
  });
}

Json to_json(const ChainReport& r) {
  Json stages = Json::array();
  for (const auto& s : r.stages)
    stages.push_back({{"name", s.name}, {"numerator", s.numerator}, {"denominator", s.denominator},
                      {"ratio", s.ratio}, {"error", s.error}});
  Json checks = Json::array();
  for (const auto& c : r.checks) checks.push_back({{"name", c.name}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"holds", c.holds}});
  return {{"step", r.step},
          {"alpha1", r.alpha1},
          {"alpha2", r.alpha2},
          {"r0", r.r0},
          {"degenerate", r.degenerate},
          {"strip1", {{"axis", r.strip1.axis}, {"half_width", r.strip1.half_width}}},
          {"strip2", {{"axis", r.strip2.axis}, {"half_width", r.strip2.half_width}}},
          {"stages", stages},
          {"checks", checks},
          {"inter_bound_holds", r.inter_bound_holds},
          {"monotone", r.monotone},
          {"trace", r.trace}};
}

}  // namespace gcl

#pragma once

#include "gcl/geometry2d.hpp"
#include "gcl/ndgauss.hpp"
#include "gcl/symmetrize.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace gcl {

using Json = nlohmann::json;

// 17 significant digits so every double round-trips; '.' decimal point.
std::string format_double(double v);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  class Row {
   public:
    Row& operator<<(double v);
    Row& operator<<(int v);
    Row& operator<<(std::size_t v);
    Row& operator<<(bool v);
    Row& operator<<(const std::string& v);

   private:
    friend class CsvTable;
    std::vector<std::string> cells_;
  };

  // Throws if the row width does not match the header.
  void add(Row row);
  std::size_t size() const { return rows_.size(); }
  std::string str() const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

// Parsers throw ConfigError naming `key` (a dotted path into the config).
Json to_json(const Body2D& body);
Body2D body2d_from_json(const Json& j, const std::string& key);

Json to_json(const Cone2D& cone);
Cone2D cone_from_json(const Json& j, const std::string& key);

Json to_json(const BodyND& body);
// {"slabs": [{"normal": [...], "halfwidth": h}], "ellipsoid": [[...]]}; either part optional.
BodyND bodynd_from_json(const Json& j, int n, const std::string& key);

Json to_json(const ChainReport& report);

}  // namespace gcl

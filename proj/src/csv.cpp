#include "mec/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mec::csv {

std::size_t Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw std::out_of_range("no column '" + std::string(name) + "' in " + schema);
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

double parse_double(std::string_view s) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return HUGE_VAL;
  if (s == "-inf") return -HUGE_VAL;
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw std::invalid_argument("not a number: '" + std::string(s) + "'");
  return v;
}

namespace {

void put_row(std::ostream& os, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (fields[i].find_first_of(",\n\"") != std::string::npos)
      throw std::invalid_argument("field needs quoting, which this format does not support: " + fields[i]);
    if (i) os << ',';
    os << fields[i];
  }
  os << '\n';
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

void write(const Table& t, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os << "# schema=" << t.schema << '/' << t.version << '\n';
  put_row(os, t.header);
  for (const auto& row : t.rows) {
    if (row.size() != t.header.size()) throw std::invalid_argument(t.schema + ": row width differs from header");
    put_row(os, row);
  }
  os.flush();
  if (!os) throw std::runtime_error("write failed for " + path.string());
}

Table read(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  Table t;
  std::string line;
  const std::string tag = "# schema=";
  if (!std::getline(is, line) || line.rfind(tag, 0) != 0)
    throw std::runtime_error(path.string() + ": missing schema line");
  const std::string id = line.substr(tag.size());
  const auto slash = id.rfind('/');
  if (slash == std::string::npos) throw std::runtime_error(path.string() + ": malformed schema line");
  t.schema = id.substr(0, slash);
  t.version = std::stoi(id.substr(slash + 1));
  if (!std::getline(is, line)) throw std::runtime_error(path.string() + ": missing header");
  t.header = split(line);
  while (std::getline(is, line)) {
    auto row = split(line);
    if (row.size() != t.header.size())
      throw std::runtime_error(path.string() + ": row " + std::to_string(t.rows.size() + 1) + " has " +
                               std::to_string(row.size()) + " fields, header has " +
                               std::to_string(t.header.size()));
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace mec::csv

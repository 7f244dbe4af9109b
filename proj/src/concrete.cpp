#include "mof/concrete.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace mof {

namespace {

[[noreturn]] void fail(const std::string& path, std::size_t line, const std::string& what) {
  std::ostringstream msg;
  msg << path << ":" << line << ": " << what;
  throw std::runtime_error(msg.str());
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

double parse_number(std::string_view field, const std::string& path, std::size_t line) {
  while (!field.empty() && (field.front() == ' ' || field.front() == '\t'))
    field.remove_prefix(1);
  while (!field.empty() && (field.back() == ' ' || field.back() == '\t'))
    field.remove_suffix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.begin(), field.end(), value);
  if (ec != std::errc{} || ptr != field.end())
    fail(path, line, "not a number: '" + std::string(field) + "'");
  return value;
}

}  // namespace

Dataset load_concrete(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open");

  constexpr std::size_t kColumns = 11;  // record number + 7 features + 3 outputs
  std::vector<ConcreteRecord> records;
  std::string line;
  std::size_t line_number = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (!header_seen) {
      header_seen = true;
      if (fields.size() != kColumns)
        fail(path, line_number, "expected an 11-column header");
      continue;
    }
    if (fields.size() != kColumns) {
      std::ostringstream what;
      what << "expected " << kColumns << " fields, got " << fields.size();
      fail(path, line_number, what.str());
    }
    ConcreteRecord rec;
    for (std::size_t j = 0; j < 7; ++j)
      rec.features[j] = parse_number(fields[j + 1], path, line_number);
    for (std::size_t j = 0; j < 3; ++j)
      rec.outputs[j] = parse_number(fields[j + 8], path, line_number);
    records.push_back(rec);
  }
  if (records.empty()) throw std::runtime_error(path + ": no data rows");

  Dataset ds;
  ds.features = Matrix(records.size(), 7);
  ds.outputs = Matrix(records.size(), 3);
  for (std::size_t i = 0; i < records.size(); ++i) {
    for (std::size_t j = 0; j < 7; ++j) ds.features(i, j) = records[i].features[j];
    for (std::size_t j = 0; j < 3; ++j) ds.outputs(i, j) = records[i].outputs[j];
  }
  ds.validate();
  return ds;
}

}  // namespace mof

#include "completeness/csv.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

namespace completeness {

namespace {

std::string format_number(double v) {
  std::array<char, 32> buf;
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  fields.push_back(field);
  return fields;
}

[[noreturn]] void schema_error(std::size_t row, const std::string& column,
                               const std::string& what) {
  throw Error(ErrorCode::Schema, "row " + std::to_string(row) + ", column '" +
                                     column + "': " + what);
}

double parse_number(const std::string& s, std::size_t row,
                    const std::string& column) {
  double v;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    schema_error(row, column, "expected a number, got '" + s + "'");
  return v;
}

std::vector<std::string> expected_header(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::Risk:
      return {"lottery_id", "z1", "z2", "p", "ce", "subject_id"};
    case ProblemKind::Games: {
      std::vector<std::string> h = {"game_id"};
      for (const char* side : {"r", "c"})
        for (int i = 1; i <= 3; ++i)
          for (int j = 1; j <= 3; ++j)
            h.push_back(side + std::to_string(i) + std::to_string(j));
      h.push_back("action");
      h.push_back("subject_id");
      return h;
    }
    case ProblemKind::Sequences:
      return {"subject_id", "round", "flips"};
    default:
      throw Error(ErrorCode::Config, "no CSV schema for custom problem kind");
  }
}

}  // namespace

Dataset dataset_from_csv(const std::string& text, ProblemKind kind) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line))
    throw Error(ErrorCode::Schema, "empty CSV input");

  const auto header = expected_header(kind);
  const auto got = split_line(line);
  if (got != header) {
    std::string expect;
    for (const auto& h : header) expect += (expect.empty() ? "" : ",") + h;
    throw Error(ErrorCode::Schema, "bad header: expected '" + expect + "'");
  }

  Dataset data;
  data.kind = kind;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto fields = split_line(line);
    if (fields.size() != header.size())
      throw Error(ErrorCode::Schema,
                  "row " + std::to_string(row) + ": expected " +
                      std::to_string(header.size()) + " fields, got " +
                      std::to_string(fields.size()));

    Observation obs;
    switch (kind) {
      case ProblemKind::Risk: {
        double z1 = parse_number(fields[1], row, "z1");
        double z2 = parse_number(fields[2], row, "z2");
        double p = parse_number(fields[3], row, "p");
        if (p < 0.0 || p > 1.0)
          schema_error(row, "p", "probability outside [0,1]");
        double ce = parse_number(fields[4], row, "ce");
        obs.x = {Feature(z1), Feature(z2), Feature(p)};
        obs.y = Outcome::real(ce);
        if (!fields[0].empty()) obs.instance_id = fields[0];
        if (!fields[5].empty()) obs.subject_id = fields[5];
        break;
      }
      case ProblemKind::Games: {
        obs.x.reserve(18);
        for (std::size_t f = 0; f < 18; ++f)
          obs.x.emplace_back(parse_number(fields[1 + f], row, header[1 + f]));
        double action = parse_number(fields[19], row, "action");
        if (action != 1.0 && action != 2.0 && action != 3.0)
          schema_error(row, "action", "must be 1, 2, or 3");
        obs.y = Outcome::action(int(action) - 1);
        if (!fields[0].empty()) obs.instance_id = fields[0];
        if (!fields[20].empty()) obs.subject_id = fields[20];
        break;
      }
      case ProblemKind::Sequences: {
        const std::string& flips = fields[2];
        if (flips.size() < 2)
          schema_error(row, "flips", "needs at least 2 flips");
        obs.x.reserve(flips.size() - 1);
        for (std::size_t i = 0; i < flips.size(); ++i) {
          char c = flips[i];
          if (c != 'H' && c != 'T')
            schema_error(row, "flips", "symbols must be H or T");
          if (i + 1 < flips.size())
            obs.x.emplace_back(c == 'H' ? 1.0 : 0.0);
          else
            obs.y = Outcome::binary(c == 'H' ? 1 : 0);
        }
        if (!fields[0].empty()) obs.subject_id = fields[0];
        if (!fields[1].empty()) {
          parse_number(fields[1], row, "round");  // numeric validation
          obs.instance_id = fields[1];
        }
        break;
      }
      default:
        throw Error(ErrorCode::Config, "no CSV schema for custom problem kind");
    }
    data.observations.push_back(std::move(obs));
  }
  data.validate();
  return data;
}

std::string dataset_to_csv(const Dataset& data) {
  std::ostringstream out;
  const auto header = expected_header(data.kind);
  for (std::size_t i = 0; i < header.size(); ++i)
    out << (i ? "," : "") << header[i];
  out << '\n';

  for (const auto& obs : data.observations) {
    switch (data.kind) {
      case ProblemKind::Risk:
        out << obs.instance_id.value_or("") << ','
            << format_number(real_feature(obs.x, 0)) << ','
            << format_number(real_feature(obs.x, 1)) << ','
            << format_number(real_feature(obs.x, 2)) << ','
            << format_number(obs.y.value) << ','
            << obs.subject_id.value_or("");
        break;
      case ProblemKind::Games: {
        out << obs.instance_id.value_or("");
        for (std::size_t f = 0; f < 18; ++f)
          out << ',' << format_number(real_feature(obs.x, f));
        out << ',' << (outcome_label(obs.y) + 1) << ','
            << obs.subject_id.value_or("");
        break;
      }
      case ProblemKind::Sequences: {
        out << obs.subject_id.value_or("") << ','
            << obs.instance_id.value_or("") << ',';
        for (std::size_t f = 0; f < obs.x.size(); ++f)
          out << (real_feature(obs.x, f) == 1.0 ? 'H' : 'T');
        out << (obs.y.value == 1.0 ? 'H' : 'T');
        break;
      }
      default:
        throw Error(ErrorCode::Config, "no CSV schema for custom problem kind");
    }
    out << '\n';
  }
  return out.str();
}

Dataset load_dataset_csv(const std::string& path, ProblemKind kind) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(ErrorCode::Schema, "cannot open data file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return dataset_from_csv(buf.str(), kind);
}

void save_dataset_csv(const Dataset& data, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw Error(ErrorCode::Generic, "cannot write data file: " + path);
  out << dataset_to_csv(data);
}

}  // namespace completeness

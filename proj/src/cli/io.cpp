#include "psd/cli/io.hpp"

#include "json.hpp"
#include "psd/serialize.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace psd::cli {

namespace {

[[noreturn]] void parse_fail(const std::string& source, std::size_t line, const std::string& what) {
  throw Error(ErrorKind::parse_error, source + ":" + std::to_string(line) + ": " + what);
}

std::string strip_comment(const std::string& line) {
  auto hash = line.find('#');
  return hash == std::string::npos ? line : line.substr(0, hash);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string current;
  for (char c : line) {
    if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
      if (!current.empty()) out.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

template <Scalar T>
std::optional<T> try_parse(const std::string& token) {
  try {
    return parse_scalar<T>(token);
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace

InputKind infer_input_kind(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".json" ? InputKind::atoms_json : InputKind::samples_csv;
}

std::string to_string(InputKind kind) { return kind == InputKind::atoms_json ? "atoms-json" : "samples-csv"; }

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::parse_error, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr);
  std::ostringstream out;
  for (unsigned int i = 0; i < length; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return out.str();
}

template <Scalar T>
SampleSet<T> parse_samples_csv(const std::string& text, const std::string& source_name) {
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  std::optional<std::size_t> weight_col;
  std::optional<std::size_t> columns;
  bool first_row = true;
  std::vector<Point<T>> obs;
  std::vector<T> weights;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto fields = split_fields(strip_comment(raw));
    if (fields.empty()) continue;
    if (first_row) {
      first_row = false;
      const bool header = std::any_of(fields.begin(), fields.end(), [](const auto& f) { return !try_parse<T>(f); });
      if (header) {
        for (std::size_t c = 0; c < fields.size(); ++c)
          if (fields[c] == "weight") weight_col = c;
        columns = fields.size();
        if (weight_col && fields.size() < 2) parse_fail(source_name, line_no, "header has only a weight column");
        continue;
      }
    }
    if (!columns) columns = fields.size();
    if (fields.size() != *columns) {
      parse_fail(source_name, line_no,
                 "expected " + std::to_string(*columns) + " fields, found " + std::to_string(fields.size()));
    }
    Point<T> p;
    for (std::size_t c = 0; c < fields.size(); ++c) {
      auto v = try_parse<T>(fields[c]);
      if (!v) parse_fail(source_name, line_no, "not a number: '" + fields[c] + "'");
      if (weight_col && c == *weight_col) {
        if (!(*v > 0)) parse_fail(source_name, line_no, "weights must be positive");
        weights.push_back(*v);
      } else {
        p.push_back(*v);
      }
    }
    obs.push_back(std::move(p));
  }
  if (obs.empty()) throw Error(ErrorKind::empty_sample, source_name + ": no observations");
  return SampleSet<T>(std::move(obs), std::move(weights));
}

template <Scalar T>
DiscreteMeasure<T> parse_atoms_json(const std::string& text, const std::string& source_name,
                                    const std::vector<std::string>& labels) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::parse_error, source_name + ": " + e.what());
  }
  if (doc.is_object() && doc.contains("atoms")) doc = doc["atoms"];
  if (!doc.is_array()) throw Error(ErrorKind::parse_error, source_name + ": expected a JSON array of atoms");

  auto coordinate = [&](const nlohmann::json& c, std::size_t atom) -> std::vector<T> {
    if (c.is_string() && !labels.empty()) {
      auto it = std::find(labels.begin(), labels.end(), c.get<std::string>());
      if (it == labels.end()) {
        throw Error(ErrorKind::point_not_in_relation,
                    source_name + ": atom " + std::to_string(atom) + ": unknown label '" + c.get<std::string>() + "'");
      }
      return {T(static_cast<long>(it - labels.begin()))};
    }
    try {
      return {scalar_from_json<T>(c)};
    } catch (const Error& e) {
      throw Error(ErrorKind::parse_error, source_name + ": atom " + std::to_string(atom) + ": " + e.what());
    }
  };

  std::vector<Point<T>> points;
  std::vector<T> weights;
  for (std::size_t k = 0; k < doc.size(); ++k) {
    const auto& atom = doc[k];
    if (!atom.is_object() || !atom.contains("point") || !atom.contains("weight")) {
      throw Error(ErrorKind::parse_error, source_name + ": atom " + std::to_string(k) + " needs 'point' and 'weight'");
    }
    Point<T> p;
    if (atom["point"].is_array()) {
      for (const auto& c : atom["point"]) {
        auto v = coordinate(c, k);
        p.insert(p.end(), v.begin(), v.end());
      }
    } else {
      p = coordinate(atom["point"], k);
    }
    points.push_back(std::move(p));
    try {
      weights.push_back(scalar_from_json<T>(atom["weight"]));
    } catch (const Error& e) {
      throw Error(ErrorKind::parse_error, source_name + ": atom " + std::to_string(k) + ": " + e.what());
    }
  }
  return make_discrete(std::move(points), std::move(weights));
}

template <Scalar T>
OrderRelation<T> parse_relation(const std::string& text, const std::string& source_name) {
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  std::optional<std::size_t> expected;
  std::vector<std::vector<std::string>> point_lines;
  std::vector<std::size_t> point_line_numbers;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  enum { header, points, edges_section } state = header;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto fields = split_fields(strip_comment(raw));
    if (fields.empty()) continue;
    if (state == header) {
      if (fields.size() != 2 || fields[0] != "points") parse_fail(source_name, line_no, "expected 'points <n>'");
      try {
        expected = std::stoul(fields[1]);
      } catch (const std::exception&) {
        parse_fail(source_name, line_no, "bad point count '" + fields[1] + "'");
      }
      state = *expected == 0 ? edges_section : points;
      if (*expected == 0) parse_fail(source_name, line_no, "relation needs at least one point");
      continue;
    }
    if (state == points) {
      if (point_lines.size() == *expected) {
        if (fields.size() != 1 || fields[0] != "edges") parse_fail(source_name, line_no, "expected 'edges'");
        state = edges_section;
        continue;
      }
      point_lines.push_back(fields);
      point_line_numbers.push_back(line_no);
      continue;
    }
    if (fields.size() != 2) parse_fail(source_name, line_no, "expected an 'i j' edge");
    try {
      std::size_t pos_a = 0, pos_b = 0;
      const std::size_t a = std::stoul(fields[0], &pos_a);
      const std::size_t b = std::stoul(fields[1], &pos_b);
      if (pos_a != fields[0].size() || pos_b != fields[1].size()) throw std::invalid_argument("edge");
      if (a >= *expected || b >= *expected) parse_fail(source_name, line_no, "edge index out of range");
      edges.emplace_back(a, b);
    } catch (const std::logic_error&) {
      parse_fail(source_name, line_no, "bad edge '" + fields[0] + " " + fields[1] + "'");
    }
  }
  if (state == header) throw Error(ErrorKind::parse_error, source_name + ": empty relation file");
  if (point_lines.size() != *expected) {
    throw Error(ErrorKind::parse_error, source_name + ": expected " + std::to_string(*expected) + " points, found " +
                                            std::to_string(point_lines.size()));
  }

  bool numeric = true;
  for (const auto& f : point_lines)
    for (const auto& tok : f) numeric = numeric && try_parse<T>(tok).has_value();

  std::vector<Point<T>> pts;
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < point_lines.size(); ++i) {
    if (numeric) {
      Point<T> p;
      for (const auto& tok : point_lines[i]) p.push_back(parse_scalar<T>(tok));
      pts.push_back(std::move(p));
    } else {
      if (point_lines[i].size() != 1) parse_fail(source_name, point_line_numbers[i], "labels must be single tokens");
      labels.push_back(point_lines[i][0]);
      pts.push_back(Point<T>{T(static_cast<long>(i))});
    }
  }
  return relation_from_edges(std::move(pts), edges, std::move(labels));
}

template <Scalar T>
DiscreteMeasure<T> empirical(const SampleSet<T>& samples) {
  std::vector<T> w = samples.weights;
  if (w.empty()) w.assign(samples.size(), T(1));
  return normalized(make_discrete(samples.observations, std::move(w)));
}

#define PSD_INSTANTIATE_IO(T)                                                                                   \
  template SampleSet<T> parse_samples_csv(const std::string&, const std::string&);                               \
  template DiscreteMeasure<T> parse_atoms_json(const std::string&, const std::string&,                           \
                                               const std::vector<std::string>&);                                 \
  template OrderRelation<T> parse_relation(const std::string&, const std::string&);                              \
  template DiscreteMeasure<T> empirical(const SampleSet<T>&);

PSD_INSTANTIATE_IO(Rational)
PSD_INSTANTIATE_IO(double)

}  // namespace psd::cli

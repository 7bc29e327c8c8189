#pragma once

// Input formats.
//
// samples-csv   one observation per row; coordinates separated by commas or
//               whitespace; an optional header row may name a `weight`
//               column; `#` starts a comment.
// atoms-json    [{"point": [coords], "weight": 0.25 | "1/4"}, ...]. A point may
//               also be a bare number or, with a labelled relation file, a
//               label string.
// relation      `points <n>`, n lines of coordinates or bare labels, `edges`,
//               then `i j` lines meaning point i precedes point j.

#include "psd/measures.hpp"
#include "psd/partial_order.hpp"
#include "psd/stats.hpp"

#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <vector>

namespace psd::cli {

enum class InputKind { samples_csv, atoms_json };

InputKind infer_input_kind(const std::filesystem::path& path);
std::string to_string(InputKind kind);

std::string read_file(const std::filesystem::path& path);
std::string sha256_hex(const std::string& bytes);

template <Scalar T>
SampleSet<T> parse_samples_csv(const std::string& text, const std::string& source_name);

/// `labels` resolves label strings when the relation file uses labels.
template <Scalar T>
DiscreteMeasure<T> parse_atoms_json(const std::string& text, const std::string& source_name,
                                    const std::vector<std::string>& labels = {});

template <Scalar T>
OrderRelation<T> parse_relation(const std::string& text, const std::string& source_name);

/// Empirical probability measure of a sample.
template <Scalar T>
DiscreteMeasure<T> empirical(const SampleSet<T>& samples);

}  // namespace psd::cli

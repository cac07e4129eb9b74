#ifndef MOM_HARNESS_TABLE_HPP
#define MOM_HARNESS_TABLE_HPP

#include <string>
#include <variant>
#include <vector>

#include "mom/errors.hpp"
#include "mom/learning.hpp"

namespace mom::harness {

using Cell = std::variant<long, double, std::string>;

struct ResultTable {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

/// Locale-independent CSV: ',' separator, '.' decimal point, LF endings.
/// Doubles are written with the shortest round-trippable representation.
std::string to_csv(const ResultTable& table);
void write_results(const std::string& path, const ResultTable& table);

/// Inverse of write_results; cells parse back as long, then double, else
/// string.  Throws ParseError with the offending line.
ResultTable read_results(const std::string& path);

/// CSV with a header row, numeric feature columns, and the label in the
/// last column.
PairwiseDataset read_csv_dataset(const std::string& path);

}  // namespace mom::harness

#endif

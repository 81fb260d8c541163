#pragma once

#include "ompath/types.hpp"

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace ompath {

/// One double at full round-trip precision (17 significant digits).
std::string format_full(double x);

/// Shared path format: header "t,x1,...,xd", one row per node.
void write_path_csv(std::ostream& out, const Path& p);
void write_path_csv(const std::string& filename, const Path& p);

/// Reads the shared path format back; dimensions come from the header.
Path read_path_csv(std::istream& in);
Path read_path_csv(const std::string& filename);

/// Flat key=value records, one per line, written in the given order.
using KeyValues = std::vector<std::pair<std::string, std::string>>;
void write_kv(std::ostream& out, const KeyValues& kv);
void write_kv(const std::string& filename, const KeyValues& kv);

}  // namespace ompath

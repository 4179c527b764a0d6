#pragma once

#include <string>
#include <vector>

#include "sketchls/data.hpp"

namespace sketchls {

/// Which CSV columns play which regression role.
struct ColumnMapping {
    std::string response;
    std::vector<std::string> regressors;
    std::vector<std::string> instruments; // empty = no Z block
    bool add_intercept = false;           // prepend a ones column to X (and Z)
};

/// Read a rectangular CSV with a header row into a DataBundle.
/// Cells must be numeric (dummies as 0/1, scientific notation accepted,
/// decimal point only). Errors carry 1-based file line / column positions.
DataBundle ingest_csv(const std::string& path, const ColumnMapping& mapping);

/// Write a bundle with canonical column names y, x1..xp, z1..zq at full
/// precision, so ingesting the file again reproduces the bundle exactly.
void write_bundle_csv(const std::string& path, const DataBundle& bundle);

/// Mapping that reads back a file produced by write_bundle_csv.
ColumnMapping canonical_mapping(std::size_t p, std::size_t q);

} // namespace sketchls

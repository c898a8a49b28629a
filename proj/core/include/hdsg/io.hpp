#pragma once

#include <string>
#include <vector>

#include "hdsg/gp.hpp"
#include "hdsg/space.hpp"

namespace hdsg {

/// Design-space definition files: UTF-8 JSON with top-level keys
/// schema_version, variables, decree_rules, incompatibilities,
/// order_relations, intermediate_nodes (see docs/design_space_schema.md).
DesignSpaceGraph parse_design_space_text(const std::string& text);
DesignSpaceGraph parse_design_space(const std::string& path);
std::string serialize_design_space(const DesignSpaceGraph& g);

/// Point files: one point per line, whitespace-separated name=value pairs,
/// the literal EXC marking exclusions, '#' starting a comment line.
std::string format_point(const DesignSpaceGraph& g, const ExtendedPoint& p);
ExtendedPoint parse_point_line(const DesignSpaceGraph& g, const std::string& line);
std::vector<ExtendedPoint> read_point_file(const DesignSpaceGraph& g, const std::string& path);
void write_point_file(const DesignSpaceGraph& g, const std::vector<ExtendedPoint>& pts,
                      const std::string& path);

/// Raw (possibly partial / invalid) assignments for correct().
RawPoint parse_raw_line(const DesignSpaceGraph& g, const std::string& line);
std::vector<RawPoint> read_raw_point_file(const DesignSpaceGraph& g, const std::string& path);

/// Versioned portable model document embedding the design space, the
/// dataset and the fitted hyperparameters.
void save_model(const GpModel& m, const std::string& path);
GpModel load_model(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

} // namespace hdsg

#pragma once

#include <filesystem>
#include <string>

#include "synreg/volume.hpp"

namespace synreg {

// RVOL v1: one UTF-8 JSON header line ('\n'-terminated) followed by the raw
// little-endian payload, x-fastest. kind "scalar" and "field3" carry float32
// (field3 interleaves xyz), kind "label" carries uint16.

void write_rvol(const std::filesystem::path& path, const Volume& v);
void write_rvol(const std::filesystem::path& path, const LabelMap& m);
void write_rvol(const std::filesystem::path& path, const DisplacementField& d);

Volume read_rvol_volume(const std::filesystem::path& path);
LabelMap read_rvol_labels(const std::filesystem::path& path);
DisplacementField read_rvol_field(const std::filesystem::path& path);

// Kind string from the header without loading the payload.
std::string rvol_kind(const std::filesystem::path& path);

// Geometry from the header without loading the payload.
GridGeometry rvol_geometry(const std::filesystem::path& path);

// FNV-1a over the full file contents; used by dataset manifests to detect
// complete artifacts when resuming.
std::uint64_t file_checksum(const std::filesystem::path& path);

} // namespace synreg

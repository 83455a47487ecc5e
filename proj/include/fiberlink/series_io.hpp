#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fiberlink/series.hpp"

namespace fiberlink {

/// Free-text metadata written as `# key = value` header lines. Keys used by
/// the tools: version, command, config, config_hash, units, columns.
using HeaderMeta = std::map<std::string, std::string>;

/// One record per line, `mjd<TAB>y<TAB>valid(0|1)`, '#' comments. mjd is
/// printed with 12 fractional digits, y with 17 significant digits, so a
/// write/read cycle is lossless. Exact timebase parameters go into header
/// directives (t0_mjd, gate_s, nu0_hz) at full precision.
void write_series(const std::string& path, const FreqSeries& s,
                  const HeaderMeta& meta = {});
FreqSeries read_series(const std::string& path);

/// Selection sidecar, `mjd<TAB>keep(0|1)<TAB>reason_bitmask`; reason bits:
/// 1=coarse, 2=mean, 4=std, 8=qf. A pre-existing gap has keep=0, reason=0.
void write_mask(const std::string& path, const ValidityMask& m,
                const std::vector<std::uint8_t>& reasons,
                const HeaderMeta& meta = {});
ValidityMask read_mask(const std::string& path,
                       std::vector<std::uint8_t>* reasons = nullptr);

/// FNV-1a 64 of a file's bytes, rendered as 16 hex digits. Used as the
/// config fingerprint in output headers and manifests.
std::string file_fingerprint(const std::string& path);
std::string bytes_fingerprint(const std::string& bytes);

}  // namespace fiberlink

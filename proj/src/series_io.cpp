#include "fiberlink/series_io.hpp"

#include <cctype>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "fiberlink/version.hpp"

namespace fiberlink {

namespace {

void write_header(std::FILE* f, const char* format, const HeaderMeta& meta) {
    std::fprintf(f, "# fiberlink %s\n", kVersion);
    std::fprintf(f, "# format = %s\n", format);
    for (const auto& [k, v] : meta) std::fprintf(f, "# %s = %s\n", k.c_str(), v.c_str());
}

// Parses "# key = value" directives; returns false for plain comments.
bool parse_directive(const std::string& line, std::string* key, std::string* val) {
    std::size_t i = 1;
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t eq = line.find('=', i);
    if (eq == std::string::npos) return false;
    std::size_t ke = eq;
    while (ke > i && std::isspace(static_cast<unsigned char>(line[ke - 1]))) --ke;
    std::size_t vs = eq + 1;
    while (vs < line.size() && std::isspace(static_cast<unsigned char>(line[vs]))) ++vs;
    std::size_t ve = line.size();
    while (ve > vs && std::isspace(static_cast<unsigned char>(line[ve - 1]))) --ve;
    if (ke <= i) return false;
    *key = line.substr(i, ke - i);
    *val = line.substr(vs, ve - vs);
    return true;
}

struct FileGuard {
    std::FILE* f = nullptr;
    ~FileGuard() { if (f) std::fclose(f); }
};

}  // namespace

void write_series(const std::string& path, const FreqSeries& s, const HeaderMeta& meta) {
    s.check();
    FileGuard g{std::fopen(path.c_str(), "w")};
    if (!g.f) throw std::runtime_error("cannot open " + path + " for writing");
    write_header(g.f, "series", meta);
    std::fprintf(g.f, "# t0_mjd = %.17g\n", s.t0_mjd);
    std::fprintf(g.f, "# gate_s = %.17g\n", s.gate_s);
    std::fprintf(g.f, "# nu0_hz = %.17g\n", s.nu0_hz);
    std::fprintf(g.f, "# columns = mjd\ty\tvalid\n");
    for (std::size_t i = 0; i < s.size(); ++i)
        std::fprintf(g.f, "%.12f\t%.16e\t%d\n", s.mjd_at(i), s.y[i], s.valid[i] ? 1 : 0);
}

FreqSeries read_series(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    FreqSeries s;
    bool have_t0 = false, have_gate = false;
    std::vector<double> mjds;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::string k, v;
            if (parse_directive(line, &k, &v)) {
                if (k == "t0_mjd") { s.t0_mjd = std::stod(v); have_t0 = true; }
                else if (k == "gate_s") { s.gate_s = std::stod(v); have_gate = true; }
                else if (k == "nu0_hz") s.nu0_hz = std::stod(v);
            }
            continue;
        }
        std::istringstream ls(line);
        double mjd = 0.0, y = 0.0;
        int v = 0;
        if (!(ls >> mjd >> y >> v))
            throw std::runtime_error(path + ": malformed series record: " + line);
        mjds.push_back(mjd);
        s.y.push_back(y);
        s.valid.push_back(v ? 1 : 0);
    }
    if (s.y.empty()) throw std::runtime_error(path + ": no data records");
    if (!have_t0) s.t0_mjd = mjds.front();
    if (!have_gate) {
        if (mjds.size() < 2)
            throw std::runtime_error(path + ": cannot infer gate from a single record");
        s.gate_s = (mjds[1] - mjds[0]) * constants::seconds_per_day;
    }
    s.check();
    // Spot-check uniform spacing against the declared timebase.
    const std::size_t last = mjds.size() - 1;
    const double expect = s.t0_mjd + static_cast<double>(last) * s.gate_s / constants::seconds_per_day;
    if (std::abs(mjds[last] - expect) * constants::seconds_per_day > 1e-3 * s.gate_s)
        throw std::runtime_error(path + ": records are not uniformly spaced");
    return s;
}

void write_mask(const std::string& path, const ValidityMask& m,
                const std::vector<std::uint8_t>& reasons, const HeaderMeta& meta) {
    if (!reasons.empty() && reasons.size() != m.bits.size())
        throw std::invalid_argument("write_mask: reasons length mismatch");
    FileGuard g{std::fopen(path.c_str(), "w")};
    if (!g.f) throw std::runtime_error("cannot open " + path + " for writing");
    write_header(g.f, "mask", meta);
    std::fprintf(g.f, "# t0_mjd = %.17g\n", m.t0_mjd);
    std::fprintf(g.f, "# gate_s = %.17g\n", m.gate_s);
    std::fprintf(g.f, "# reason_bits = 1=coarse 2=mean 4=std 8=qf\n");
    std::fprintf(g.f, "# columns = mjd\tkeep\treason_bitmask\n");
    for (std::size_t i = 0; i < m.size(); ++i)
        std::fprintf(g.f, "%.12f\t%d\t%u\n", m.mjd_at(i), m.bits[i] ? 1 : 0,
                     reasons.empty() ? 0u : static_cast<unsigned>(reasons[i]));
}

ValidityMask read_mask(const std::string& path, std::vector<std::uint8_t>* reasons) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    ValidityMask m;
    bool have_t0 = false, have_gate = false;
    std::vector<double> mjds;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::string k, v;
            if (parse_directive(line, &k, &v)) {
                if (k == "t0_mjd") { m.t0_mjd = std::stod(v); have_t0 = true; }
                else if (k == "gate_s") { m.gate_s = std::stod(v); have_gate = true; }
            }
            continue;
        }
        std::istringstream ls(line);
        double mjd = 0.0;
        int keep = 0;
        unsigned reason = 0;
        if (!(ls >> mjd >> keep)) throw std::runtime_error(path + ": malformed mask record: " + line);
        ls >> reason;  // optional third column
        mjds.push_back(mjd);
        m.bits.push_back(keep ? 1 : 0);
        if (reasons) reasons->push_back(static_cast<std::uint8_t>(reason));
    }
    if (m.bits.empty()) throw std::runtime_error(path + ": no mask records");
    if (!have_t0) m.t0_mjd = mjds.front();
    if (!have_gate) {
        if (mjds.size() < 2)
            throw std::runtime_error(path + ": cannot infer gate from a single record");
        m.gate_s = (mjds[1] - mjds[0]) * constants::seconds_per_day;
    }
    return m;
}

std::string bytes_fingerprint(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

std::string file_fingerprint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return bytes_fingerprint(ss.str());
}

}  // namespace fiberlink

#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ncg::tntp {

/// Parse failure with the 1-based line number where it happened.
class ParseError : public std::runtime_error {
public:
    ParseError(int line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

struct Link {
    int from = 0, to = 0;  // 1-based node numbers
    double capacity = 0.0;
    double length = 0.0;
    double free_flow_time = 0.0;
    double b = 0.0;
    double power = 0.0;
    // parsed and ignored: speed limit, toll, link type
    double speed = 0.0, toll = 0.0;
    int type = 0;
};

struct Network {
    int zones = 0;
    int nodes = 0;
    int first_thru_node = 1;  // parsed and ignored
    std::vector<Link> links;
};

struct TripTable {
    int zones = 0;
    double total = 0.0;                            // header total
    std::map<int, std::map<int, double>> demand;   // origin -> destination -> volume
    int positive_pairs() const {
        int n = 0;
        for (const auto& [o, row] : demand)
            for (const auto& [d, v] : row)
                if (v > 0.0) ++n;
        return n;
    }
    double sum() const {
        double s = 0.0;
        for (const auto& [o, row] : demand)
            for (const auto& [d, v] : row) s += v;
        return s;
    }
};

namespace detail {

inline std::string strip(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline double parse_number(const std::string& tok, int line) {
    try {
        std::size_t used = 0;
        double v = std::stod(tok, &used);
        if (used != tok.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw ParseError(line, "not a number: '" + tok + "'");
    }
}

/// Reads `<KEY> value` metadata lines up to <END OF METADATA>. Returns the
/// body start index.
inline std::size_t parse_metadata(const std::vector<std::string>& lines,
                                  std::map<std::string, std::string>& meta) {
    for (std::size_t i = 0; i < lines.size(); ++i) {
        std::string t = strip(lines[i]);
        if (t.empty() || t[0] == '~') continue;
        if (t[0] != '<') return i;  // metadata section is optional
        auto close = t.find('>');
        if (close == std::string::npos) throw ParseError(static_cast<int>(i + 1), "malformed header: '" + t + "'");
        std::string key = t.substr(1, close - 1);
        std::string value = strip(t.substr(close + 1));
        if (key == "END OF METADATA") return i + 1;
        meta[key] = value;
    }
    return lines.size();
}

inline std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string cur;
    for (char c : text) {
        if (c == '\n') {
            lines.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) lines.push_back(cur);
    return lines;
}

inline int meta_int(const std::map<std::string, std::string>& meta, const std::string& key, int fallback) {
    auto it = meta.find(key);
    if (it == meta.end()) return fallback;
    try {
        return std::stoi(it->second);
    } catch (const std::exception&) {
        throw ParseError(0, "malformed header value for <" + key + ">: '" + it->second + "'");
    }
}

inline std::string format_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, end);
}

}  // namespace detail

inline Network parse_net(const std::string& text) {
    auto lines = detail::split_lines(text);
    std::map<std::string, std::string> meta;
    std::size_t body = detail::parse_metadata(lines, meta);

    Network net;
    net.zones = detail::meta_int(meta, "NUMBER OF ZONES", 0);
    net.nodes = detail::meta_int(meta, "NUMBER OF NODES", 0);
    net.first_thru_node = detail::meta_int(meta, "FIRST THRU NODE", 1);
    int expected_links = detail::meta_int(meta, "NUMBER OF LINKS", -1);

    for (std::size_t i = body; i < lines.size(); ++i) {
        int lineno = static_cast<int>(i + 1);
        std::string t = detail::strip(lines[i]);
        if (t.empty() || t[0] == '~' || t[0] == '<') continue;
        std::istringstream in(t);
        std::vector<std::string> tok;
        std::string word;
        while (in >> word) {
            if (word == ";") continue;
            if (!word.empty() && word.back() == ';') word.pop_back();
            if (!word.empty()) tok.push_back(word);
        }
        if (tok.empty()) continue;
        if (tok.size() < 7) throw ParseError(lineno, "short link record (need at least 7 fields)");
        Link l;
        l.from = static_cast<int>(detail::parse_number(tok[0], lineno));
        l.to = static_cast<int>(detail::parse_number(tok[1], lineno));
        l.capacity = detail::parse_number(tok[2], lineno);
        l.length = detail::parse_number(tok[3], lineno);
        l.free_flow_time = detail::parse_number(tok[4], lineno);
        l.b = detail::parse_number(tok[5], lineno);
        l.power = detail::parse_number(tok[6], lineno);
        if (tok.size() > 7) l.speed = detail::parse_number(tok[7], lineno);
        if (tok.size() > 8) l.toll = detail::parse_number(tok[8], lineno);
        if (tok.size() > 9) l.type = static_cast<int>(detail::parse_number(tok[9], lineno));
        if (!(l.capacity > 0.0)) throw ParseError(lineno, "negative or zero capacity");
        if (l.free_flow_time < 0.0) throw ParseError(lineno, "negative free flow time");
        if (l.b < 0.0) throw ParseError(lineno, "negative BPR coefficient");
        if (l.power < 0.0) throw ParseError(lineno, "negative BPR power");
        if (l.from < 1 || l.from > net.nodes || l.to < 1 || l.to > net.nodes)
            throw ParseError(lineno, "link endpoint outside node range");
        net.links.push_back(l);
    }
    if (expected_links >= 0 && static_cast<int>(net.links.size()) != expected_links)
        throw ParseError(static_cast<int>(lines.size()),
                         "link count mismatch: header says " + std::to_string(expected_links) +
                             ", body has " + std::to_string(net.links.size()));
    return net;
}

inline TripTable parse_trips(const std::string& text) {
    auto lines = detail::split_lines(text);
    std::map<std::string, std::string> meta;
    std::size_t body = detail::parse_metadata(lines, meta);

    TripTable table;
    table.zones = detail::meta_int(meta, "NUMBER OF ZONES", 0);
    if (auto it = meta.find("TOTAL OD FLOW"); it != meta.end())
        table.total = detail::parse_number(it->second, 0);

    int origin = -1;
    for (std::size_t i = body; i < lines.size(); ++i) {
        int lineno = static_cast<int>(i + 1);
        std::string t = detail::strip(lines[i]);
        if (t.empty() || t[0] == '~' || t[0] == '<') continue;
        if (t.rfind("Origin", 0) == 0) {
            origin = static_cast<int>(detail::parse_number(detail::strip(t.substr(6)), lineno));
            table.demand[origin];
            continue;
        }
        if (origin < 0) throw ParseError(lineno, "trip record before any Origin line");
        // "dest : volume; dest : volume; ..."
        std::string chunk;
        std::istringstream in(t);
        while (std::getline(in, chunk, ';')) {
            chunk = detail::strip(chunk);
            if (chunk.empty()) continue;
            auto colon = chunk.find(':');
            if (colon == std::string::npos) throw ParseError(lineno, "expected 'destination : volume'");
            int dest = static_cast<int>(detail::parse_number(detail::strip(chunk.substr(0, colon)), lineno));
            double vol = detail::parse_number(detail::strip(chunk.substr(colon + 1)), lineno);
            if (vol < 0.0) throw ParseError(lineno, "negative demand");
            table.demand[origin][dest] = vol;
        }
    }
    if (table.total > 0.0) {
        double s = table.sum();
        if (std::abs(s - table.total) > 1e-6 * std::max(1.0, std::abs(table.total)))
            throw ParseError(static_cast<int>(lines.size()),
                             "total demand mismatch: header says " + detail::format_double(table.total) +
                                 ", body sums to " + detail::format_double(s));
    } else {
        table.total = table.sum();
    }
    return table;
}

inline std::string write_net(const Network& net) {
    std::string out;
    out += "<NUMBER OF ZONES> " + std::to_string(net.zones) + "\n";
    out += "<NUMBER OF NODES> " + std::to_string(net.nodes) + "\n";
    out += "<FIRST THRU NODE> " + std::to_string(net.first_thru_node) + "\n";
    out += "<NUMBER OF LINKS> " + std::to_string(net.links.size()) + "\n";
    out += "<END OF METADATA>\n\n";
    out += "~ \tInit node \tTerm node \tCapacity \tLength \tFree Flow Time \tB\tPower\tSpeed limit \tToll \tLink Type\t;\n";
    for (const auto& l : net.links) {
        out += "\t" + std::to_string(l.from) + "\t" + std::to_string(l.to) + "\t" +
               detail::format_double(l.capacity) + "\t" + detail::format_double(l.length) + "\t" +
               detail::format_double(l.free_flow_time) + "\t" + detail::format_double(l.b) + "\t" +
               detail::format_double(l.power) + "\t" + detail::format_double(l.speed) + "\t" +
               detail::format_double(l.toll) + "\t" + std::to_string(l.type) + "\t;\n";
    }
    return out;
}

inline std::string write_trips(const TripTable& t) {
    std::string out;
    out += "<NUMBER OF ZONES> " + std::to_string(t.zones) + "\n";
    out += "<TOTAL OD FLOW> " + detail::format_double(t.sum()) + "\n";
    out += "<END OF METADATA>\n\n";
    for (const auto& [origin, row] : t.demand) {
        out += "Origin " + std::to_string(origin) + "\n";
        int per_line = 0;
        std::string line;
        for (const auto& [dest, vol] : row) {
            line += "    " + std::to_string(dest) + " :    " + detail::format_double(vol) + ";";
            if (++per_line == 5) {
                out += line + "\n";
                line.clear();
                per_line = 0;
            }
        }
        if (!line.empty()) out += line + "\n";
        out += "\n";
    }
    return out;
}

}  // namespace ncg::tntp

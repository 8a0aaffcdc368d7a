#include "netsize/scenario_io.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "netsize/errors.hpp"

namespace netsize {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> tokens(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (pos < s.size()) {
        while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t' || s[pos] == ','))
            ++pos;
        std::size_t end = pos;
        while (end < s.size() && s[end] != ' ' && s[end] != '\t' && s[end] != ',')
            ++end;
        if (end > pos) out.push_back(s.substr(pos, end - pos));
        pos = end;
    }
    return out;
}

class LineParser {
public:
    LineParser(const std::string& file, int line) : file_(file), line_(line) {}

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(file_, line_, msg);
    }

    std::int64_t integer(std::string_view tok) const {
        std::int64_t v = 0;
        const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
            fail("expected integer, got '" + std::string(tok) + "'");
        return v;
    }

    double real(std::string_view tok) const {
        try {
            std::size_t used = 0;
            const std::string text(tok);
            const double v = std::stod(text, &used);
            if (used != text.size()) fail("expected number, got '" + text + "'");
            return v;
        } catch (const std::logic_error&) {
            fail("expected number, got '" + std::string(tok) + "'");
        }
    }

    bool boolean(std::string_view tok) const {
        if (tok == "true" || tok == "on" || tok == "1") return true;
        if (tok == "false" || tok == "off" || tok == "0") return false;
        fail("expected true/false, got '" + std::string(tok) + "'");
    }

    IdEdge edge(std::string_view tok) const {
        const auto dash = tok.find('-');
        if (dash == std::string_view::npos || dash == 0 || dash + 1 == tok.size())
            fail("expected edge 'i-j', got '" + std::string(tok) + "'");
        return {integer(tok.substr(0, dash)), integer(tok.substr(dash + 1))};
    }

    /// "a..b" range or single integer, appended to out.
    void id_list_token(std::string_view tok, std::vector<std::int64_t>& out) const {
        const auto dots = tok.find("..");
        if (dots == std::string_view::npos) {
            out.push_back(integer(tok));
            return;
        }
        const std::int64_t lo = integer(tok.substr(0, dots));
        const std::int64_t hi = integer(tok.substr(dots + 2));
        if (hi < lo) fail("empty range '" + std::string(tok) + "'");
        if (hi - lo > 1000000) fail("range too large '" + std::string(tok) + "'");
        for (std::int64_t v = lo; v <= hi; ++v) out.push_back(v);
    }

private:
    const std::string& file_;
    int line_;
};

} // namespace

Scenario parse_scenario_text(std::string_view text, const std::string& name) {
    Scenario sc;
    sc.name = name;

    std::set<std::string> seen;
    const auto once = [&](const std::string& key, const LineParser& lp) {
        if (!seen.insert(key).second) lp.fail("duplicate key '" + key + "'");
    };

    bool init_seed_set = false;
    bool init_range_set = false;

    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(
            pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        const auto hash = line.find('#');
        if (hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        LineParser lp(name, line_no);
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            lp.fail("expected 'key = value'");
        const std::string key{trim(line.substr(0, eq))};
        const std::string_view value = trim(line.substr(eq + 1));
        if (key.empty()) lp.fail("missing key before '='");
        if (value.empty()) lp.fail("missing value for key '" + key + "'");

        if (key == "agents") {
            once(key, lp);
            for (auto tok : tokens(value)) lp.id_list_token(tok, sc.agents);
        } else if (key == "edges") {
            for (auto tok : tokens(value)) sc.initial_edges.push_back(lp.edge(tok));
        } else if (key == "event") {
            TopologyEvent ev;
            bool have_time = false;
            for (auto tok : tokens(value)) {
                if (tok.substr(0, 2) == "t=") {
                    if (have_time) lp.fail("event has two times");
                    ev.time = lp.real(tok.substr(2));
                    have_time = true;
                } else if (tok.substr(0, 4) == "add=") {
                    ev.add_edges.push_back(lp.edge(tok.substr(4)));
                } else if (tok.substr(0, 7) == "remove=") {
                    ev.remove_edges.push_back(lp.edge(tok.substr(7)));
                } else {
                    lp.fail("unknown event token '" + std::string(tok) + "'");
                }
            }
            if (!have_time) lp.fail("event needs t=<time>");
            if (ev.add_edges.empty() && ev.remove_edges.empty())
                lp.fail("event changes no edges");
            sc.events.push_back(std::move(ev));
        } else if (key == "gamma") {
            once(key, lp);
            sc.gamma = lp.real(value);
        } else if (key == "horizon") {
            once(key, lp);
            sc.horizon = lp.real(value);
        } else if (key == "sample_interval") {
            once(key, lp);
            sc.sample_interval = lp.real(value);
        } else if (key == "init_mode") {
            once(key, lp);
            if (value == "zeros")
                sc.init.mode = InitialState::Mode::zeros;
            else if (value == "random")
                sc.init.mode = InitialState::Mode::seeded_random;
            else
                lp.fail("init_mode must be zeros or random");
        } else if (key == "init_seed") {
            once(key, lp);
            sc.init.seed = static_cast<std::uint64_t>(lp.integer(value));
            init_seed_set = true;
        } else if (key == "init_range") {
            once(key, lp);
            sc.init.range = lp.real(value);
            init_range_set = true;
        } else if (key == "rel_tol") {
            once(key, lp);
            sc.integrator.rel_tol = lp.real(value);
        } else if (key == "abs_tol") {
            once(key, lp);
            sc.integrator.abs_tol = lp.real(value);
        } else if (key == "max_step") {
            once(key, lp);
            sc.integrator.max_step = lp.real(value);
        } else if (key == "affine_fast_path") {
            once(key, lp);
            sc.integrator.affine_fast_path = lp.boolean(value);
        } else {
            lp.fail("unknown key '" + key + "'");
        }
    }

    LineParser tail(name, line_no);
    if (sc.init.mode == InitialState::Mode::seeded_random && !init_seed_set)
        tail.fail("init_mode = random requires init_seed");
    if (sc.init.mode == InitialState::Mode::zeros &&
        (init_seed_set || init_range_set))
        tail.fail("init_seed/init_range only apply to init_mode = random");

    try {
        validate(sc);
    } catch (const std::invalid_argument& e) {
        throw ParseError(name, line_no, std::string("invalid scenario: ") + e.what());
    }
    return sc;
}

Scenario parse_scenario_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path, 0, "cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario_text(buf.str(), path);
}

} // namespace netsize

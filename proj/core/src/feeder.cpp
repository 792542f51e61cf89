#include "gridfuse/feeder.hpp"

#include <cmath>
#include <fstream>
#include <queue>
#include <sstream>

#include <json.hpp>

#include "gridfuse/error.hpp"

namespace gridfuse {

FeederModel::FeederModel(std::vector<Bus> buses, std::vector<Line> lines, double substation_v_pu,
                         double base_kva)
    : substation_v_(substation_v_pu), base_kva_(base_kva) {
    if (buses.empty()) throw InvalidArgument("feeder has no buses");
    if (!(substation_v_pu > 0.0) || !std::isfinite(substation_v_pu))
        throw InvalidArgument("substation_v_pu must be positive");
    if (!(base_kva > 0.0)) throw InvalidArgument("base_kva must be positive");

    std::unordered_map<std::string, std::size_t> in_index;
    std::optional<std::size_t> root;
    for (std::size_t i = 0; i < buses.size(); ++i) {
        const auto& b = buses[i];
        if (b.id.empty()) throw InvalidArgument("bus " + std::to_string(i) + " has an empty id");
        if (!in_index.emplace(b.id, i).second) throw InvalidArgument("duplicate bus id '" + b.id + "'");
        if (!(b.load_kw >= 0.0) || !std::isfinite(b.load_kw))
            throw InvalidArgument("bus '" + b.id + "' has a negative or non-finite load_kw");
        if (!b.parent) {
            if (root) throw InvalidArgument("multiple roots: '" + buses[*root].id + "' and '" + b.id + "'");
            root = i;
        }
    }
    if (!root) throw InvalidArgument("no root bus (every bus has a parent)");
    for (const auto& b : buses)
        if (b.parent && !in_index.count(*b.parent))
            throw InvalidArgument("bus '" + b.id + "' names unknown parent '" + *b.parent + "'");

    // Walk up from every bus; a walk that never reaches the root is a cycle.
    for (const auto& b : buses) {
        std::string cur = b.id;
        for (std::size_t steps = 0;; ++steps) {
            const auto& bb = buses[in_index.at(cur)];
            if (!bb.parent) break;
            if (steps > buses.size())
                throw InvalidArgument("cycle in parent links at edge " + *bb.parent + " -> " + bb.id);
            cur = *bb.parent;
        }
    }

    std::vector<std::optional<std::size_t>> line_of(buses.size());
    for (std::size_t k = 0; k < lines.size(); ++k) {
        const auto& l = lines[k];
        const std::string tag = "line " + std::to_string(k) + " (" + l.from + " -> " + l.to + ")";
        if (!in_index.count(l.from) || !in_index.count(l.to)) throw InvalidArgument(tag + " references an unknown bus");
        if (!(l.r_pu >= 0.0) || !(l.x_pu >= 0.0) || !std::isfinite(l.r_pu) || !std::isfinite(l.x_pu))
            throw InvalidArgument(tag + " has a negative or non-finite impedance");
        std::size_t child;
        const auto& to = buses[in_index.at(l.to)];
        const auto& from = buses[in_index.at(l.from)];
        if (to.parent && *to.parent == l.from)
            child = in_index.at(l.to);
        else if (from.parent && *from.parent == l.to)
            child = in_index.at(l.from);
        else
            throw InvalidArgument(tag + " closes a cycle: it does not follow a parent link");
        if (line_of[child]) throw InvalidArgument(tag + " duplicates the line feeding '" + buses[child].id + "'");
        line_of[child] = k;
    }
    for (std::size_t i = 0; i < buses.size(); ++i)
        if (buses[i].parent && !line_of[i])
            throw InvalidArgument("no line connects bus '" + buses[i].id + "' to its parent '" + *buses[i].parent + "'");

    // Breadth-first order from the root.
    std::vector<std::vector<std::size_t>> children(buses.size());
    for (std::size_t i = 0; i < buses.size(); ++i)
        if (buses[i].parent) children[in_index.at(*buses[i].parent)].push_back(i);
    std::vector<std::size_t> order;
    std::vector<int> depth_in(buses.size(), 0);
    std::queue<std::size_t> q;
    q.push(*root);
    while (!q.empty()) {
        const std::size_t i = q.front();
        q.pop();
        order.push_back(i);
        for (std::size_t c : children[i]) {
            depth_in[c] = depth_in[i] + 1;
            q.push(c);
        }
    }

    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        const std::size_t i = order[pos];
        index_.emplace(buses[i].id, pos);
        buses_.push_back(buses[i]);
        depth_.push_back(depth_in[i]);
        max_depth_ = std::max(max_depth_, depth_in[i]);
        if (line_of[i]) {
            r_.push_back(lines[*line_of[i]].r_pu);
            x_.push_back(lines[*line_of[i]].x_pu);
        } else {
            r_.push_back(0.0);
            x_.push_back(0.0);
        }
    }
    parent_.resize(buses_.size());
    for (std::size_t i = 0; i < buses_.size(); ++i)
        if (buses_[i].parent) parent_[i] = index_.at(*buses_[i].parent);
}

std::optional<std::size_t> FeederModel::index_of(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::vector<std::string> FeederModel::bus_ids() const {
    std::vector<std::string> ids;
    ids.reserve(buses_.size());
    for (const auto& b : buses_) ids.push_back(b.id);
    return ids;
}

std::vector<std::size_t> FeederModel::load_buses() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < buses_.size(); ++i)
        if (buses_[i].load_kw > 0.0) out.push_back(i);
    return out;
}

namespace {

std::size_t line_of_offset(const std::string& text, std::size_t offset) {
    offset = std::min(offset, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

// Line of the first occurrence of "key": "value" style text mentioning `id`.
std::size_t line_mentioning(const std::string& text, const std::string& needle) {
    const auto pos = text.find(needle);
    return pos == std::string::npos ? 0 : line_of_offset(text, pos);
}

}  // namespace

FeederModel parse_feeder(const std::string& json_text, const std::string& source) {
    using nlohmann::json;
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError(source, line_of_offset(json_text, e.byte), e.what());
    }
    std::vector<Bus> buses;
    std::vector<Line> lines;
    double v0 = 1.0, base = 2500.0;
    try {
        v0 = j.value("substation_v_pu", 1.0);
        base = j.value("base_kva", 2500.0);
        for (const auto& b : j.at("buses")) {
            Bus bus;
            bus.id = b.at("id").get<std::string>();
            if (b.contains("parent") && !b.at("parent").is_null()) bus.parent = b.at("parent").get<std::string>();
            bus.load_kw = b.value("load_kw", 0.0);
            buses.push_back(std::move(bus));
        }
        for (const auto& l : j.at("lines")) {
            lines.push_back({l.at("from").get<std::string>(), l.at("to").get<std::string>(),
                             l.at("r_pu").get<double>(), l.at("x_pu").get<double>()});
        }
    } catch (const json::exception& e) {
        throw ParseError(source, 0, e.what());
    }
    try {
        return FeederModel(std::move(buses), std::move(lines), v0, base);
    } catch (const InvalidArgument& e) {
        // Point at the first line of the file that mentions the offending item.
        std::string msg = e.what();
        std::size_t line = 0;
        const auto q1 = msg.find('(');
        if (msg.rfind("line ", 0) == 0 && q1 != std::string::npos) {
            const auto arrow = msg.find(" -> ", q1);
            const auto close = msg.find(')', q1);
            if (arrow != std::string::npos && close != std::string::npos) {
                const std::string to = msg.substr(arrow + 4, close - arrow - 4);
                line = line_mentioning(json_text, "\"to\": \"" + to + "\"");
            }
        } else {
            const auto a = msg.find('\'');
            const auto b = a == std::string::npos ? a : msg.find('\'', a + 1);
            if (b != std::string::npos) line = line_mentioning(json_text, "\"" + msg.substr(a + 1, b - a - 1) + "\"");
        }
        throw ParseError(source, line, msg);
    }
}

FeederModel load_feeder(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path.string(), 0, "cannot open feeder file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_feeder(ss.str(), path.string());
}

std::filesystem::path bundled_feeder_path() {
    return std::filesystem::path(GRIDFUSE_DATA_DIR) / "ieee37_sp.json";
}

PowerFlowResult lindistflow_solve(const FeederModel& feeder, std::span<const BusLoad> loads) {
    const std::size_t n = feeder.size();
    if (loads.size() != n) throw InvalidArgument("lindistflow_solve: expected one load per bus");
    for (const auto& l : loads)
        if (!std::isfinite(l.p_pu) || !std::isfinite(l.q_pu)) throw InvalidArgument("lindistflow_solve: non-finite load");

    // Buses are topologically ordered, so a reverse sweep accumulates subtrees.
    std::vector<double> P(n), Q(n);
    for (std::size_t i = 0; i < n; ++i) {
        P[i] = loads[i].p_pu;
        Q[i] = loads[i].q_pu;
    }
    for (std::size_t i = n; i-- > 1;) {
        const std::size_t p = *feeder.parent(i);
        P[p] += P[i];
        Q[p] += Q[i];
    }

    PowerFlowResult out;
    out.w.resize(n);
    out.v_mag.resize(n);
    out.angle_rad.resize(n);
    const double v0 = feeder.substation_v_pu();
    out.w[0] = v0 * v0;
    out.v_mag[0] = v0;
    out.angle_rad[0] = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        const std::size_t p = *feeder.parent(i);
        const double r = feeder.r(i), x = feeder.x(i);
        out.w[i] = out.w[p] - 2.0 * (r * P[i] + x * Q[i]);
        if (!(out.w[i] > 0.0))
            throw InfeasibleOperatingPoint("lindistflow_solve: squared voltage " + std::to_string(out.w[i]) +
                                           " at bus '" + feeder.bus(i).id + "'");
        out.v_mag[i] = std::sqrt(out.w[i]);
        out.angle_rad[i] = out.angle_rad[p] - (x * P[i] - r * Q[i]) / out.w[p];
    }
    return out;
}

std::map<std::string, double> normalized_depths(const FeederModel& feeder) {
    std::map<std::string, double> out;
    const double denom = std::max(1, feeder.max_depth());
    for (std::size_t i = 0; i < feeder.size(); ++i) out[feeder.bus(i).id] = feeder.depth(i) / denom;
    return out;
}

}  // namespace gridfuse

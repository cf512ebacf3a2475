#include "netobs/io.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace netobs::io {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::BadInput, "cannot write " + path.string());
    }
    out << text;
}

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::BadInput, "cannot read " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

namespace {

std::vector<std::vector<double>> read_csv_columns(const fs::path& path, std::size_t n_cols) {
    std::string text = read_text_file(path);
    std::vector<std::vector<double>> cols(n_cols);
    std::istringstream lines(text);
    std::string line;
    bool header = true;
    while (std::getline(lines, line)) {
        if (line.empty()) {
            continue;
        }
        if (header) { // first line is the column header
            header = false;
            continue;
        }
        std::istringstream fields(line);
        std::string field;
        std::size_t i = 0;
        while (std::getline(fields, field, ',') && i < n_cols) {
            cols[i++].push_back(std::strtod(field.c_str(), nullptr));
        }
        if (i != n_cols) {
            throw Error(ErrorCode::BadInput,
                        "malformed CSV row in " + path.string() + ": " + line);
        }
    }
    return cols;
}

} // namespace

void write_trace_csv(const fs::path& path, const TraceSeries& trace) {
    std::string out = "time,plus,minus\n";
    for (std::size_t i = 0; i < trace.times.size(); ++i) {
        out += format_double(trace.times[i]) + "," + format_double(trace.plus[i]) + "," +
               format_double(trace.minus[i]) + "\n";
    }
    write_text_file(path, out);
}

TraceSeries read_trace_csv(const fs::path& path) {
    auto cols = read_csv_columns(path, 3);
    TraceSeries trace;
    trace.times = std::move(cols[0]);
    trace.plus = std::move(cols[1]);
    trace.minus = std::move(cols[2]);
    return trace;
}

void write_l2_csv(const fs::path& path, const std::vector<double>& times,
                  const std::vector<double>& l2) {
    std::string out = "time,l2\n";
    for (std::size_t i = 0; i < times.size(); ++i) {
        out += format_double(times[i]) + "," + format_double(l2[i]) + "\n";
    }
    write_text_file(path, out);
}

std::pair<std::vector<double>, std::vector<double>> read_l2_csv(const fs::path& path) {
    auto cols = read_csv_columns(path, 2);
    return {std::move(cols[0]), std::move(cols[1])};
}

void write_state_csv(const fs::path& path, const SystemState& state, const GridMap& grids) {
    std::string out = "edge,x,plus,minus\n";
    for (const auto& [edge_id, field] : state.fields) {
        const EdgeGrid& grid = grids.at(edge_id);
        for (std::size_t j = 0; j < field.plus.size(); ++j) {
            out += std::to_string(edge_id) + "," +
                   format_double(static_cast<double>(j) * grid.dx) + "," +
                   format_double(field.plus[j]) + "," + format_double(field.minus[j]) + "\n";
        }
    }
    write_text_file(path, out);
}

std::string serialize_initial_data(const InitialData& ic) {
    ordered_json doc;
    doc["edges"] = ordered_json::array();
    for (const auto& [edge_id, profile] : ic.edges) {
        ordered_json entry;
        entry["id"] = edge_id;
        switch (profile.kind) {
            case EdgeProfile::Kind::Constant:
                entry["kind"] = "constant";
                entry["plus"] = profile.plus;
                entry["minus"] = profile.minus;
                break;
            case EdgeProfile::Kind::Samples: {
                entry["kind"] = "samples";
                auto points = ordered_json::array();
                for (const auto& s : profile.samples) {
                    points.push_back({s[0], s[1], s[2]});
                }
                entry["points"] = std::move(points);
                break;
            }
            case EdgeProfile::Kind::ExpRamp:
                entry["kind"] = "exp-ramp";
                entry["beta"] = profile.beta;
                entry["length"] = profile.length;
                break;
        }
        doc["edges"].push_back(std::move(entry));
    }
    return doc.dump(2) + "\n";
}

InitialData parse_initial_data(const std::string& text) {
    InitialData ic;
    json doc;
    try {
        doc = json::parse(text);
        for (const auto& entry : doc.at("edges")) {
            EdgeId id = entry.at("id").get<EdgeId>();
            std::string kind = entry.at("kind").get<std::string>();
            if (kind == "constant") {
                ic.set(id, EdgeProfile::constant(entry.at("plus").get<double>(),
                                                 entry.at("minus").get<double>()));
            } else if (kind == "samples") {
                std::vector<std::array<double, 3>> samples;
                for (const auto& p : entry.at("points")) {
                    samples.push_back({p.at(0).get<double>(), p.at(1).get<double>(),
                                       p.at(2).get<double>()});
                }
                ic.set(id, EdgeProfile::from_samples(std::move(samples)));
            } else if (kind == "exp-ramp") {
                ic.set(id, EdgeProfile::exp_ramp(entry.at("beta").get<double>(),
                                                 entry.at("length").get<double>()));
            } else {
                throw Error(ErrorCode::BadInput, "unknown initial-data kind '" + kind + "'");
            }
        }
    } catch (const json::exception& ex) {
        throw Error(ErrorCode::BadInput, std::string("malformed initial-data file: ") + ex.what());
    }
    return ic;
}

std::string serialize_boundary_data(const BoundaryData& bc) {
    ordered_json doc;
    doc["nodes"] = ordered_json::array();
    for (const auto& [node_id, signal] : bc.by_node) {
        ordered_json entry;
        entry["id"] = node_id;
        switch (signal.kind) {
            case BoundarySignal::Kind::Zero:
                entry["kind"] = "zero";
                break;
            case BoundarySignal::Kind::Constant:
                entry["kind"] = "constant";
                entry["value"] = signal.value;
                break;
            case BoundarySignal::Kind::Sine:
                entry["kind"] = "sine";
                entry["amplitude"] = signal.amplitude;
                entry["frequency"] = signal.frequency;
                break;
            case BoundarySignal::Kind::Table:
                entry["kind"] = "table";
                entry["times"] = signal.times;
                entry["values"] = signal.values;
                break;
        }
        doc["nodes"].push_back(std::move(entry));
    }
    return doc.dump(2) + "\n";
}

BoundaryData parse_boundary_data(const std::string& text) {
    BoundaryData bc;
    json doc;
    try {
        doc = json::parse(text);
        for (const auto& entry : doc.at("nodes")) {
            NodeId id = entry.at("id").get<NodeId>();
            std::string kind = entry.at("kind").get<std::string>();
            if (kind == "zero") {
                bc.set(id, BoundarySignal::zero());
            } else if (kind == "constant") {
                bc.set(id, BoundarySignal::constant(entry.at("value").get<double>()));
            } else if (kind == "sine") {
                bc.set(id, BoundarySignal::sine(entry.at("amplitude").get<double>(),
                                                entry.at("frequency").get<double>()));
            } else if (kind == "table") {
                bc.set(id, BoundarySignal::table(entry.at("times").get<std::vector<double>>(),
                                                 entry.at("values").get<std::vector<double>>()));
            } else {
                throw Error(ErrorCode::BadInput, "unknown boundary kind '" + kind + "'");
            }
        }
    } catch (const json::exception& ex) {
        throw Error(ErrorCode::BadInput, std::string("malformed boundary file: ") + ex.what());
    }
    return bc;
}

void write_manifest(const fs::path& path, const RunManifest& manifest) {
    ordered_json doc;
    doc["version"] = manifest.version;
    doc["command"] = manifest.command;
    doc["config"] = json::parse(manifest.config_json.empty() ? "{}" : manifest.config_json);
    doc["seed"] = manifest.seed;
    doc["wall_time_s"] = manifest.wall_time_s;
    doc["files"] = manifest.files;
    write_text_file(path, doc.dump(2) + "\n");
}

RunManifest read_manifest(const fs::path& path) {
    RunManifest manifest;
    try {
        json doc = json::parse(read_text_file(path));
        manifest.version = doc.at("version").get<std::string>();
        manifest.command = doc.at("command").get<std::string>();
        manifest.config_json = doc.at("config").dump();
        manifest.seed = doc.at("seed").get<unsigned>();
        manifest.wall_time_s = doc.at("wall_time_s").get<double>();
        manifest.files = doc.at("files").get<std::vector<std::string>>();
    } catch (const json::exception& ex) {
        throw Error(ErrorCode::BadInput, std::string("malformed manifest: ") + ex.what());
    }
    return manifest;
}

std::vector<std::string> export_result(const fs::path& dir, const SimulationResult& result,
                                       const std::string& prefix) {
    fs::create_directories(dir);
    std::vector<std::string> files;
    auto emit = [&](const std::string& name) {
        files.push_back(name);
        return dir / name;
    };
    write_l2_csv(emit(prefix + "l2.csv"), result.times, result.l2);
    write_state_csv(emit(prefix + "final_state.csv"), result.final_state, result.grids);
    for (const auto& [key, trace] : result.traces) {
        write_trace_csv(emit(prefix + "trace_" + key.label() + ".csv"), trace);
    }
    return files;
}

} // namespace netobs::io

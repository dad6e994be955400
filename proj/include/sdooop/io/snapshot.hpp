#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "sdooop/errors.hpp"
#include "sdooop/model.hpp"

namespace sdooop::io {

// Model persistence as a versioned JSON document:
//
//   {"format": "sdooop-model", "version": 1,
//    "params": {"k":..,"x":..,"T":..,"T0":..,"n_bins":..,"q_id":..,"seed":..,"distance":".."},
//    "dims": D, "i_lao":.., "t_lao":.., "points_seen":.., "t_last":..,
//    "rng": "<hex>",
//    "observers": [{"position":[..], "coeffs":[[re,im],..], "h":.., "inserted_at":..}, ..]}
//
// Ensembles wrap member documents:
//   {"format": "sdooop-ensemble", "version": 1, "members": [ <model>, .. ]}
//
// Doubles are written in shortest round-trip form, so restore(snapshot(m))
// continues the stream exactly like m.
inline constexpr int snapshot_version = 1;
inline constexpr std::string_view model_format = "sdooop-model";
inline constexpr std::string_view ensemble_format = "sdooop-ensemble";

inline nlohmann::json to_json(const ModelSnapshot& s)
{
    using nlohmann::json;
    json params = {{"k", s.params.k},       {"x", s.params.x},         {"T", s.params.T},
                   {"T0", s.params.T0},     {"n_bins", s.params.n_bins}, {"q_id", s.params.q_id},
                   {"seed", s.params.seed}, {"distance", std::string(to_string(s.params.distance))}};
    json observers = json::array();
    for (const auto& o : s.observers) {
        json coeffs = json::array();
        for (const auto& c : o.coeffs)
            coeffs.push_back({c.real(), c.imag()});
        observers.push_back({{"position", o.position}, {"coeffs", coeffs}, {"h", o.h}, {"inserted_at", o.inserted_at}});
    }
    return {{"format", std::string(model_format)},
            {"version", snapshot_version},
            {"params", params},
            {"dims", s.dims},
            {"i_lao", s.i_lao},
            {"t_lao", s.t_lao},
            {"points_seen", s.points_seen},
            {"t_last", s.t_last},
            {"rng", s.rng_state},
            {"observers", observers}};
}

namespace detail {

inline void check_header(const nlohmann::json& doc, std::string_view format)
{
    if (!doc.is_object() || !doc.contains("format") || doc["format"] != format)
        throw SnapshotError("not a " + std::string(format) + " document");
    if (!doc.contains("version") || !doc["version"].is_number_integer())
        throw SnapshotError("snapshot lacks a version");
    if (doc["version"].get<int>() != snapshot_version)
        throw SnapshotError("unsupported snapshot version " + doc["version"].dump() + " (expected " +
                            std::to_string(snapshot_version) + ")");
}

} // namespace detail

inline ModelSnapshot snapshot_from_json(const nlohmann::json& doc)
{
    detail::check_header(doc, model_format);
    try {
        ModelSnapshot s;
        const auto& p = doc.at("params");
        s.params.k = p.at("k").get<std::size_t>();
        s.params.x = p.at("x").get<std::size_t>();
        s.params.T = p.at("T").get<double>();
        s.params.T0 = p.at("T0").get<double>();
        s.params.n_bins = p.at("n_bins").get<std::size_t>();
        s.params.q_id = p.at("q_id").get<double>();
        s.params.seed = p.at("seed").get<std::uint64_t>();
        s.params.distance = parse_distance(p.at("distance").get<std::string>());
        s.dims = doc.at("dims").get<std::size_t>();
        s.i_lao = doc.at("i_lao").get<std::uint64_t>();
        s.t_lao = doc.at("t_lao").get<double>();
        s.points_seen = doc.at("points_seen").get<std::uint64_t>();
        s.t_last = doc.at("t_last").get<double>();
        s.rng_state = doc.at("rng").get<std::string>();
        for (const auto& o : doc.at("observers")) {
            Observer obs;
            obs.position = o.at("position").get<std::vector<double>>();
            for (const auto& c : o.at("coeffs")) {
                if (!c.is_array() || c.size() != 2)
                    throw SnapshotError("coefficient must be a [re, im] pair");
                obs.coeffs.emplace_back(c[0].get<double>(), c[1].get<double>());
            }
            if (obs.coeffs.size() != s.params.n_bins)
                throw SnapshotError("observer has " + std::to_string(obs.coeffs.size()) +
                                    " coefficients but the header declares n_bins = " +
                                    std::to_string(s.params.n_bins));
            obs.h = o.at("h").get<double>();
            obs.inserted_at = o.at("inserted_at").get<double>();
            s.observers.push_back(std::move(obs));
        }
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw SnapshotError(std::string("malformed snapshot: ") + e.what());
    } catch (const InvalidParameter& e) {
        throw SnapshotError(std::string("malformed snapshot: ") + e.what());
    }
}

inline std::string dump_snapshot(const ModelSnapshot& s) { return to_json(s).dump() + "\n"; }

inline std::string dump_snapshots(const std::vector<ModelSnapshot>& members)
{
    if (members.size() == 1)
        return dump_snapshot(members.front());
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& m : members)
        arr.push_back(to_json(m));
    nlohmann::json doc = {{"format", std::string(ensemble_format)}, {"version", snapshot_version}, {"members", arr}};
    return doc.dump() + "\n";
}

// Accepts a model or an ensemble document; a model yields one member.
inline std::vector<ModelSnapshot> parse_snapshots(std::string_view text)
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw SnapshotError(std::string("malformed snapshot: ") + e.what());
    }
    if (doc.is_object() && doc.contains("format") && doc["format"] == ensemble_format) {
        detail::check_header(doc, ensemble_format);
        if (!doc.contains("members") || !doc["members"].is_array() || doc["members"].empty())
            throw SnapshotError("ensemble snapshot has no members");
        std::vector<ModelSnapshot> out;
        for (const auto& m : doc["members"])
            out.push_back(snapshot_from_json(m));
        return out;
    }
    return {snapshot_from_json(doc)};
}

inline ModelSnapshot parse_snapshot(std::string_view text)
{
    auto all = parse_snapshots(text);
    if (all.size() != 1)
        throw SnapshotError("expected a single-model snapshot, found an ensemble");
    return all.front();
}

inline std::vector<ModelSnapshot> load_snapshots(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw SnapshotError("cannot open snapshot '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_snapshots(buf.str());
}

} // namespace sdooop::io

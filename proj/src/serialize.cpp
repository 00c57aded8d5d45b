#include "nadid/serialize.hpp"

#include <fstream>

namespace nadid {

using nlohmann::json;

namespace {

json table_to_object(const std::vector<double>& values) {
    json obj = json::object();
    for (std::size_t mask = 0; mask < values.size(); ++mask) {
        obj[std::to_string(mask)] = values[mask];
    }
    return obj;
}

std::vector<double> object_to_table(const json& obj, std::size_t expected, const char* what) {
    if (!obj.is_object()) {
        throw ValidationError(std::string("capacity JSON: '") + what + "' must be an object");
    }
    if (obj.size() != expected) {
        throw ValidationError(std::string("capacity JSON: '") + what + "' has " +
                              std::to_string(obj.size()) + " entries, expected " +
                              std::to_string(expected));
    }
    std::vector<double> values(expected);
    std::vector<bool> seen(expected, false);
    for (const auto& [key, val] : obj.items()) {
        std::size_t mask = 0;
        try {
            mask = std::stoull(key);
        } catch (const std::exception&) {
            throw ValidationError("capacity JSON: subset key '" + key +
                                  "' is not a decimal bitmask");
        }
        if (mask >= expected) {
            throw ValidationError("capacity JSON: subset key '" + key + "' is out of range");
        }
        if (!val.is_number()) {
            throw ValidationError("capacity JSON: value for subset '" + key +
                                  "' is not a number");
        }
        values[mask] = val.get<double>();
        seen[mask] = true;
    }
    for (std::size_t mask = 0; mask < expected; ++mask) {
        if (!seen[mask]) {
            throw ValidationError("capacity JSON: subset '" + std::to_string(mask) +
                                  "' is missing");
        }
    }
    return values;
}

}  // namespace

json capacity_to_json(const Capacity& capacity) {
    json j;
    j["n"] = capacity.ground().size();
    j["labels"] = capacity.ground().labels();
    j["normalized"] = capacity.normalized();
    if (capacity.is_explicit()) {
        j["representation"] = "explicit";
        j["values"] =
            table_to_object(std::get<Capacity::ExplicitTable>(capacity.representation()).values);
    } else if (capacity.is_mobius()) {
        j["representation"] = "mobius";
        j["mobius"] =
            table_to_object(std::get<Capacity::MobiusCoeffs>(capacity.representation()).coeffs);
    } else {
        const auto& dist = std::get<Capacity::Distorted>(capacity.representation());
        j["representation"] = "distorted";
        json params;
        params["base"] = "fraction";
        if (dist.kind == Capacity::Distorted::Kind::identity) {
            params["kind"] = "identity";
        } else {
            params["kind"] = "sigmoid";
            params["lambda"] = dist.sigmoid.lambda;
            params["theta"] = dist.sigmoid.theta;
            params["anchor"] = dist.anchor == Anchor::raw ? "raw" : "anchored";
        }
        j["params"] = params;
    }
    return j;
}

Capacity capacity_from_json(const json& j) {
    if (!j.is_object() || !j.contains("n") || !j.contains("labels") ||
        !j.contains("representation")) {
        throw ValidationError("capacity JSON must carry 'n', 'labels' and 'representation'");
    }
    const int n = j.at("n").get<int>();
    std::vector<std::string> labels = j.at("labels").get<std::vector<std::string>>();
    if (static_cast<int>(labels.size()) != n) {
        throw ValidationError("capacity JSON: 'labels' length does not match 'n'");
    }
    GroundSet ground(std::move(labels));
    const bool normalized = j.value("normalized", false);
    const std::string repr = j.at("representation").get<std::string>();
    if (repr == "explicit") {
        return make_explicit_capacity(
            ground, object_to_table(j.at("values"), ground.subset_count(), "values"),
            normalized);
    }
    if (repr == "mobius") {
        return make_mobius_capacity(
            ground, object_to_table(j.at("mobius"), ground.subset_count(), "mobius"),
            normalized);
    }
    if (repr == "distorted") {
        const json& params = j.at("params");
        const std::string kind = params.at("kind").get<std::string>();
        if (kind == "identity") {
            return make_uniform_capacity(ground);
        }
        if (kind == "sigmoid") {
            SigmoidDistortion sig{params.at("lambda").get<double>(),
                                  params.at("theta").get<double>()};
            const std::string anchor = params.value("anchor", "raw");
            return make_sigmoid_capacity(ground, sig,
                                         anchor == "anchored" ? Anchor::anchored : Anchor::raw);
        }
        throw ValidationError("capacity JSON: unknown distortion kind '" + kind + "'");
    }
    throw ValidationError("capacity JSON: unknown representation '" + repr + "'");
}

Capacity read_capacity_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open capacity file '" + path + "' for reading");
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& err) {
        throw ValidationError("capacity file '" + path + "' is not valid JSON: " + err.what());
    }
    return capacity_from_json(j);
}

void write_capacity_file(const std::string& path, const Capacity& capacity) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    out << capacity_to_json(capacity).dump(2) << '\n';
    if (!out.good()) {
        throw IoError("write to '" + path + "' failed");
    }
}

json fit_result_to_json(const FitResult& result) {
    json j = capacity_to_json(result.capacity);
    json diag;
    diag["objective"] = result.objective;
    diag["kkt_residual"] = result.kkt_residual;
    diag["iterations"] = result.iterations;
    diag["active_constraints"] = result.active_constraints;
    j["diagnostics"] = diag;
    return j;
}

}  // namespace nadid

#include "lwi/errors.hpp"
#include "lwi/models.hpp"

#include <json.hpp>

namespace lwi {

namespace {

using nlohmann::json;

constexpr int kModelFormat = 1;

std::string loss_name(GbtLoss loss) {
    switch (loss) {
        case GbtLoss::SquaredError: return "squared_error";
        case GbtLoss::Huber: return "huber";
        case GbtLoss::Quantile: return "quantile";
    }
    return "squared_error";
}

GbtLoss loss_from_name(const std::string& name) {
    if (name == "squared_error") return GbtLoss::SquaredError;
    if (name == "huber") return GbtLoss::Huber;
    if (name == "quantile") return GbtLoss::Quantile;
    throw DataError("model json: unknown loss '" + name + "'");
}

json parse_checked(const std::string& text, const char* kind) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw DataError("model json: parse failure");
    if (j.value("model_format", -1) != kModelFormat)
        throw DataError("model json: unsupported model_format");
    if (j.value("kind", "") != kind)
        throw DataError(std::string("model json: expected kind '") + kind + "'");
    return j;
}

} // namespace

std::string model_to_json(const LinearFit& fit) {
    json j;
    j["model_format"] = kModelFormat;
    j["kind"] = "linear";
    j["names"] = fit.names;
    j["coefficients"] = fit.coefficients; // intercept first
    j["n_train"] = fit.n_train;
    j["condition_warning"] = fit.condition_warning;
    return j.dump(2);
}

LinearFit linear_from_json(const std::string& text) {
    json j = parse_checked(text, "linear");
    LinearFit fit;
    fit.names = j.at("names").get<std::vector<std::string>>();
    fit.coefficients = j.at("coefficients").get<std::vector<double>>();
    fit.n_train = j.at("n_train").get<size_t>();
    fit.condition_warning = j.at("condition_warning").get<bool>();
    if (fit.coefficients.size() != fit.names.size() + 1)
        throw DataError("model json: coefficient/name count mismatch");
    return fit;
}

std::string model_to_json(const GbtModel& model) {
    json trees = json::array();
    for (const auto& tree : model.trees) {
        json t;
        auto& feature = t["feature"] = json::array();
        auto& threshold = t["threshold"] = json::array();
        auto& left = t["left"] = json::array();
        auto& right = t["right"] = json::array();
        auto& value = t["value"] = json::array();
        auto& gain = t["gain"] = json::array();
        for (const auto& nd : tree.nodes) {
            feature.push_back(nd.feature);
            threshold.push_back(nd.threshold);
            left.push_back(nd.left);
            right.push_back(nd.right);
            value.push_back(nd.leaf_value);
            gain.push_back(nd.gain);
        }
        trees.push_back(std::move(t));
    }

    json j;
    j["model_format"] = kModelFormat;
    j["kind"] = "gbt";
    j["loss"] = loss_name(model.loss);
    j["base_score"] = model.base_score;
    j["learning_rate"] = model.learning_rate;
    j["feature_names"] = model.feature_names;
    j["feature_gain"] = model.feature_gain;
    j["train_loss"] = model.train_loss;
    j["trees"] = std::move(trees);
    return j.dump(2);
}

GbtModel gbt_from_json(const std::string& text) {
    json j = parse_checked(text, "gbt");
    GbtModel model;
    model.loss = loss_from_name(j.at("loss").get<std::string>());
    model.base_score = j.at("base_score").get<double>();
    model.learning_rate = j.at("learning_rate").get<double>();
    model.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    model.feature_gain = j.at("feature_gain").get<std::vector<double>>();
    model.train_loss = j.at("train_loss").get<std::vector<double>>();

    for (const auto& t : j.at("trees")) {
        const auto& feature = t.at("feature");
        const size_t n = feature.size();
        if (t.at("threshold").size() != n || t.at("left").size() != n ||
            t.at("right").size() != n || t.at("value").size() != n || t.at("gain").size() != n)
            throw DataError("model json: ragged tree arrays");
        GbtTree tree;
        tree.nodes.resize(n);
        for (size_t i = 0; i < n; ++i) {
            GbtNode& nd = tree.nodes[i];
            nd.feature = feature[i].get<int>();
            nd.threshold = t.at("threshold")[i].get<double>();
            nd.left = t.at("left")[i].get<int>();
            nd.right = t.at("right")[i].get<int>();
            nd.leaf_value = t.at("value")[i].get<double>();
            nd.gain = t.at("gain")[i].get<double>();
            if (nd.feature >= 0 &&
                (nd.left < 0 || nd.right < 0 || static_cast<size_t>(nd.left) >= n ||
                 static_cast<size_t>(nd.right) >= n))
                throw DataError("model json: split node with invalid children");
        }
        model.trees.push_back(std::move(tree));
    }
    return model;
}

} // namespace lwi

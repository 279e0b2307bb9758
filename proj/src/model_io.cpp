#include "logonet/model_io.hpp"

#include <json.hpp>

#include <utility>

#include "logonet/errors.hpp"

namespace logonet {
namespace {

using nlohmann::json;

json precision_triplets(const SparsePrecision& precision) {
    json out = json::array();
    for (const auto& [key, value] : precision.entries()) {
        out.push_back(json::array({key.first, key.second, value}));
    }
    return out;
}

json model_skeleton(const char* type, const Eigen::VectorXd& mu, const SparsePrecision& precision) {
    json doc;
    doc["type"] = type;
    doc["mu"] = std::vector<double>(mu.data(), mu.data() + mu.size());
    doc["precision"] = precision_triplets(precision);
    doc["network"] = json::parse(serialize(precision.forest()));
    return doc;
}

}  // namespace

std::string serialize_model(const GaussianModel& model) {
    return model_skeleton("gaussian", model.mu, model.precision).dump();
}

std::string serialize_model(const StudentTModel& model) {
    json doc = model_skeleton("student_t", model.mu, model.precision);
    doc["nu"] = model.nu;
    doc["em"] = {{"iterations", model.em_iterations}, {"final_loglik", model.final_loglik}};
    return doc.dump();
}

AnyModel deserialize_model(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& ex) {
        throw parse_error(std::string("model document: ") + ex.what());
    }
    try {
        AnyModel model;
        const std::string type = doc.at("type").get<std::string>();
        if (type == "gaussian") {
            model.type = ModelType::gaussian;
        } else if (type == "student_t") {
            model.type = ModelType::student_t;
        } else {
            throw parse_error("model document: unknown type '" + type + "'");
        }

        const auto mu = doc.at("mu").get<std::vector<double>>();
        model.mu = Eigen::Map<const Eigen::VectorXd>(mu.data(), static_cast<Eigen::Index>(mu.size()));

        auto forest = std::make_shared<CliqueForest>(deserialize(doc.at("network").dump()));
        const int p = forest->p;
        if (static_cast<int>(mu.size()) != p)
            throw parse_error("model document: mu length does not match network");

        Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(p, p);
        for (const auto& triplet : doc.at("precision")) {
            if (!triplet.is_array() || triplet.size() != 3)
                throw parse_error("model document: malformed precision triplet");
            const int i = triplet[0].get<int>();
            const int j = triplet[1].get<int>();
            const double value = triplet[2].get<double>();
            if (i < 0 || i >= p || j < 0 || j >= p)
                throw parse_error("model document: precision index out of range");
            dense(i, j) = value;
            dense(j, i) = value;
        }

        Eigen::LLT<Eigen::MatrixXd> llt(dense);
        if (llt.info() != Eigen::Success)
            throw parse_error("model document: precision matrix is not positive definite");
        Eigen::MatrixXd sigma = llt.solve(Eigen::MatrixXd::Identity(p, p));
        model.precision = assemble_precision(sigma, std::move(forest));

        if (model.type == ModelType::student_t) {
            model.nu = doc.at("nu").get<double>();
            if (!(model.nu > 2.0))
                throw parse_error("model document: nu must exceed 2");
            if (doc.contains("em")) {
                model.em_iterations = doc["em"].value("iterations", 0);
                model.final_loglik = doc["em"].value("final_loglik", 0.0);
            }
        }
        return model;
    } catch (const json::exception& ex) {
        throw parse_error(std::string("model document: ") + ex.what());
    }
}

double log_likelihood(const ObservationMatrix& data, const AnyModel& model) {
    if (model.type == ModelType::gaussian) {
        GaussianModel gaussian{model.mu, model.precision};
        return gaussian_log_likelihood(data, gaussian);
    }
    StudentTModel student{model.mu, model.precision, model.nu, model.em_iterations, model.final_loglik};
    return student_log_likelihood(data, student);
}

}  // namespace logonet

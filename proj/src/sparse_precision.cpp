#include "logonet/sparse_precision.hpp"

#include <cmath>

#include "logonet/errors.hpp"

namespace logonet {

namespace {

BlockFactor invert_block(const Eigen::MatrixXd& block, const std::vector<int>& indices,
                         const char* kind, int id, double ridge) {
    Eigen::MatrixXd B = block;
    if (ridge > 0.0) B.diagonal().array() += ridge;
    Eigen::LLT<Eigen::MatrixXd> llt(B);
    if (llt.info() != Eigen::Success)
        throw block_conditioning_error(
            kind, id,
            std::string(kind) + " " + std::to_string(id) + " covariance block is not positive definite");
    const int m = static_cast<int>(B.rows());
    Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(m, m));
    inv = ((inv + inv.transpose()) / 2.0).eval();
    double logdet_cov = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    return {indices, std::move(inv), -logdet_cov};
}

Eigen::MatrixXd gather_block(const Eigen::MatrixXd& cov, const std::vector<int>& idx) {
    const int m = static_cast<int>(idx.size());
    Eigen::MatrixXd B(m, m);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) B(a, b) = cov(idx[a], idx[b]);
    return B;
}

void accumulate(std::map<std::pair<int, int>, double>& entries, const BlockFactor& f,
                double sign) {
    const int m = static_cast<int>(f.indices.size());
    for (int a = 0; a < m; ++a)
        for (int b = a; b < m; ++b) {
            int i = f.indices[a], j = f.indices[b];
            if (i > j) std::swap(i, j);
            entries[{i, j}] += sign * f.precision(a, b);
        }
}

}  // namespace

SparsePrecision::SparsePrecision(std::shared_ptr<const CliqueForest> forest,
                                 std::map<std::pair<int, int>, double> entries,
                                 std::vector<BlockFactor> clique_blocks,
                                 std::vector<BlockFactor> sep_blocks)
    : forest_(std::move(forest)),
      entries_(std::move(entries)),
      clique_blocks_(std::move(clique_blocks)),
      sep_blocks_(std::move(sep_blocks)) {}

double SparsePrecision::entry(int i, int j) const {
    if (i > j) std::swap(i, j);
    auto it = entries_.find({i, j});
    return it == entries_.end() ? 0.0 : it->second;
}

SparsePrecision assemble_precision_blocks(const std::vector<Eigen::MatrixXd>& clique_cov,
                                          const std::vector<Eigen::MatrixXd>& sep_cov,
                                          std::shared_ptr<const CliqueForest> forest,
                                          double ridge) {
    if (clique_cov.size() != forest->cliques.size() || sep_cov.size() != forest->separators.size())
        throw dimension_error("block count does not match forest");

    std::vector<BlockFactor> cb, sb;
    cb.reserve(clique_cov.size());
    sb.reserve(sep_cov.size());
    std::map<std::pair<int, int>, double> entries;
    for (std::size_t c = 0; c < clique_cov.size(); ++c) {
        cb.push_back(invert_block(clique_cov[c], forest->cliques[c], "clique",
                                  static_cast<int>(c), ridge));
        accumulate(entries, cb.back(), +1.0);
    }
    for (std::size_t s = 0; s < sep_cov.size(); ++s) {
        sb.push_back(invert_block(sep_cov[s], forest->separators[s].vertices, "separator",
                                  static_cast<int>(s), ridge));
        accumulate(entries, sb.back(), -1.0);
    }

    SparsePrecision prec(std::move(forest), std::move(entries), std::move(cb), std::move(sb));
    if (!check_positive_definite(prec))
        throw error("assembled precision is not positive definite");
    return prec;
}

SparsePrecision assemble_precision(const Eigen::MatrixXd& cov,
                                   std::shared_ptr<const CliqueForest> forest, double ridge) {
    if (cov.rows() != forest->p || cov.cols() != forest->p)
        throw dimension_error("covariance size does not match forest vertex count");
    std::vector<Eigen::MatrixXd> cc, sc;
    cc.reserve(forest->cliques.size());
    sc.reserve(forest->separators.size());
    for (const auto& c : forest->cliques) cc.push_back(gather_block(cov, c));
    for (const auto& s : forest->separators) sc.push_back(gather_block(cov, s.vertices));
    return assemble_precision_blocks(cc, sc, std::move(forest), ridge);
}

SparsePrecision assemble_precision(const DependenceMatrix& cov, const CliqueForest& forest,
                                   double ridge) {
    if (cov.is_correlation())
        throw domain_error("assemble_precision expects a covariance matrix");
    return assemble_precision(cov.matrix, std::make_shared<CliqueForest>(forest), ridge);
}

double log_det(const SparsePrecision& precision) {
    double ld = 0.0;
    for (const auto& f : precision.clique_blocks()) ld += f.logdet_precision;
    for (const auto& f : precision.separator_blocks()) ld -= f.logdet_precision;
    return ld;
}

double mahalanobis_sq(const Eigen::VectorXd& x, const Eigen::VectorXd& mu,
                      const SparsePrecision& precision) {
    if (x.size() != precision.p() || mu.size() != precision.p())
        throw dimension_error("mahalanobis_sq: dimension mismatch");
    Eigen::VectorXd d = x - mu;
    auto block_form = [&](const BlockFactor& f) {
        const int m = static_cast<int>(f.indices.size());
        Eigen::VectorXd dc(m);
        for (int a = 0; a < m; ++a) dc[a] = d[f.indices[a]];
        return dc.dot(f.precision * dc);
    };
    double total = 0.0;
    for (const auto& f : precision.clique_blocks()) total += block_form(f);
    for (const auto& f : precision.separator_blocks()) total -= block_form(f);
    return total;
}

Eigen::VectorXd mahalanobis_sq_all(const ObservationMatrix& data, const Eigen::VectorXd& mu,
                                   const SparsePrecision& precision) {
    if (data.p() != precision.p() || mu.size() != precision.p())
        throw dimension_error("mahalanobis_sq_all: dimension mismatch");
    const Eigen::Index q = data.q();
    Eigen::VectorXd d2 = Eigen::VectorXd::Zero(q);
    auto add_blocks = [&](const std::vector<BlockFactor>& blocks, double sign) {
        for (const auto& f : blocks) {
            const int m = static_cast<int>(f.indices.size());
            Eigen::MatrixXd D(q, m);
            for (int a = 0; a < m; ++a)
                D.col(a) = data.values().col(f.indices[a]).array() - mu[f.indices[a]];
            d2 += sign * (D * f.precision).cwiseProduct(D).rowwise().sum();
        }
    };
    add_blocks(precision.clique_blocks(), +1.0);
    add_blocks(precision.separator_blocks(), -1.0);
    return d2;
}

bool check_positive_definite(const SparsePrecision& precision) {
    Eigen::LLT<Eigen::MatrixXd> llt(dense_embedding(precision));
    return llt.info() == Eigen::Success;
}

Eigen::MatrixXd dense_embedding(const SparsePrecision& precision) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(precision.p(), precision.p());
    for (const auto& [ij, v] : precision.entries()) {
        J(ij.first, ij.second) = v;
        J(ij.second, ij.first) = v;
    }
    return J;
}

}  // namespace logonet

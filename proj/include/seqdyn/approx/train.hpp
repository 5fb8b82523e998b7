#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "seqdyn/approx/dataset.hpp"
#include "seqdyn/approx/network.hpp"
#include "seqdyn/core/grid.hpp"

namespace seqdyn::approx {

struct TrainConfig {
    Box domain = Box::cube(3, 0.0, 1.0);
    int dataset_size = 100000;
    std::uint64_t seed = 1;

    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    double lr_decay = 1.0; // multiplicative per epoch
    bool cosine = false;   // cosine annealing from learning_rate to 0 over `epochs` (overrides lr_decay)
    int batch_size = 1024;
    int epochs = 200;
    int patience = 10;
    double validation_fraction = 0.1;
    double divergence_factor = 1e3;
    // Adam runs on (P, W~, b~) with W x + b = W~ (x - c) / h + b~, c and h the centre and
    // half-widths of the domain. Same model; only the optimizer geometry changes.
    bool center_inputs = true;

    double jacobian_penalty_weight = 0.0;

    // Hinge penalty w * mean(max(0, margin - f_k(x))^2) over points of the box faces
    // {x_k = lo_k}. Zero weight disables it.
    double inward_penalty_weight = 0.0;
    double inward_margin = 0.0;
    int inward_samples = 768;

    /// Tuned schedule for the three-saddle target: D = 1e5, smaller batches, decayed step,
    /// and a weak inward push on the faces where the cycle lives.
    static TrainConfig desk()
    {
        TrainConfig c;
        c.dataset_size = 100000;
        c.batch_size = 256;
        c.learning_rate = 3e-3;
        c.lr_decay = 0.98;
        c.inward_penalty_weight = 1.0;
        c.inward_margin = 0.005;
        return c;
    }

    /// Desk schedule at the full dataset size D = 1e6.
    static TrainConfig paper()
    {
        TrainConfig c = desk();
        c.dataset_size = 1000000;
        return c;
    }

    void validate() const
    {
        require(dataset_size >= 1, "TrainConfig: D must be >= 1");
        require(batch_size >= 1 && batch_size <= dataset_size, "TrainConfig: need 1 <= batch <= D");
        require(epochs >= 0, "TrainConfig: epochs must be >= 0");
        require(learning_rate > 0.0 && lr_decay > 0.0 && lr_decay <= 1.0, "TrainConfig: bad step size or decay");
        require(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0, "TrainConfig: Adam betas in [0, 1)");
        require(patience >= 1, "TrainConfig: patience must be >= 1");
        require(validation_fraction >= 0.0 && validation_fraction <= 1.0, "TrainConfig: bad validation fraction");
        require(jacobian_penalty_weight >= 0.0 && inward_penalty_weight >= 0.0,
                "TrainConfig: penalty weights must be >= 0");
        require(inward_samples >= 1, "TrainConfig: inward_samples must be >= 1");
    }
};

enum class TrainStatus { completed, early_stopped, diverged };

inline const char* status_name(TrainStatus s)
{
    switch (s) {
    case TrainStatus::completed:
        return "completed";
    case TrainStatus::early_stopped:
        return "early_stopped";
    case TrainStatus::diverged:
        return "diverged";
    }
    return "?";
}

struct TrainResult {
    ApproxNetwork net;
    std::vector<double> train_mse; // index 0 is the initialization, then one entry per epoch
    std::vector<double> val_mse;
    TrainStatus status = TrainStatus::completed;
    int epochs_run = 0;
    int best_epoch = 0;
    double final_mse = 0.0;
    std::string message;
};

/// Mean over samples of ||f(x) - y||^2.
inline double mse(const ApproxNetwork& net, const Mat& x, const Mat& y)
{
    if (x.cols() == 0)
        return 0.0;
    double sum = 0.0;
    constexpr Eigen::Index chunk = 1024;
    Mat z, r;
    for (Eigen::Index s = 0; s < x.cols(); s += chunk) {
        const Eigen::Index m = std::min(chunk, x.cols() - s);
        z.noalias() = net.W() * x.middleCols(s, m);
        z.colwise() += net.b();
        z = net.sigma().value(z);
        r = -x.middleCols(s, m) - y.middleCols(s, m);
        r.noalias() += net.P() * z;
        sum += r.squaredNorm();
    }
    return sum / static_cast<double>(x.cols());
}

namespace detail {

struct Grad {
    Mat p, w;
    Vec b;
};

// Per-batch buffers, reused across steps to keep allocation out of the inner loop.
struct Workspace {
    Mat z, s, ds, r, dz;
};

/// Jacobians of g at the columns of x, flattened column-major into n*n rows.
inline Mat target_jacobians(const VectorField& g, const Mat& x)
{
    const auto n = x.rows();
    Mat out(n * n, x.cols());
    for (Eigen::Index k = 0; k < x.cols(); ++k)
        out.col(k) = g.jacobian(x.col(k)).reshaped();
    return out;
}

/// Random points on the faces {x_k = lo_k}; face index of point j in faces[j].
inline Mat face_points(const Box& box, int count, std::uint64_t seed, std::vector<int>& faces)
{
    const int n = box.dim();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Mat pts(n, count);
    faces.assign(count, 0);
    for (int j = 0; j < count; ++j) {
        faces[j] = j % n;
        for (int i = 0; i < n; ++i)
            pts(i, j) = box.lo[i] + (box.hi[i] - box.lo[i]) * unit(rng);
        pts(faces[j], j) = box.lo[faces[j]];
    }
    return pts;
}

// Value-MSE gradient (plus optional Jacobian penalty) on a batch. Returns the batch objective.
inline double batch_gradient(const ApproxNetwork& net, const Mat& x, const Mat& y, const Mat* jt, double jw,
                             Grad& g, Workspace& ws)
{
    const double inv_b = 1.0 / static_cast<double>(x.cols());
    ws.z.noalias() = net.W() * x;
    ws.z.colwise() += net.b();
    ws.s = (1.0 - 2.0 / ((2.0 * ws.z.array()).exp() + 1.0)).matrix();
    ws.ds = (1.0 - ws.s.array().square()).matrix();
    ws.r = -x - y;
    ws.r.noalias() += net.P() * ws.s;
    const double loss = ws.r.squaredNorm() * inv_b;

    ws.r *= 2.0 * inv_b; // d(loss)/d(f)
    g.p.noalias() = ws.r * ws.s.transpose();
    ws.dz.noalias() = net.P().transpose() * ws.r;
    ws.dz.array() *= ws.ds.array();
    g.w.noalias() = ws.dz * x.transpose();
    g.b = ws.dz.rowwise().sum();
    const Mat& s = ws.s;
    const Mat& ds = ws.ds;

    double jloss = 0.0;
    if (jt && jw > 0.0) {
        const int n = net.n();
        const Mat& P = net.P();
        const Mat& W = net.W();
        const Mat d2 = (-2.0 * s.array() * ds.array()).matrix();
        const Mat eye = Mat::Identity(n, n);
        Vec c(net.hidden());
        for (Eigen::Index k = 0; k < x.cols(); ++k) {
            const Mat e = (-eye + P * ds.col(k).asDiagonal() * W) -
                          jt->col(k).reshaped(n, n);
            jloss += e.squaredNorm();
            const Mat ge = 2.0 * jw * inv_b * e; // d(obj)/d(Df)
            // Df = -I + sum_j sigma'(z_j) P_:j W_j:
            g.p.noalias() += ge * W.transpose() * ds.col(k).asDiagonal();
            const Mat pg = P.transpose() * ge; // N x n
            g.w.noalias() += ds.col(k).asDiagonal() * pg;
            for (int j = 0; j < net.hidden(); ++j)
                c[j] = pg.row(j).dot(W.row(j));
            const Vec cz = c.cwiseProduct(d2.col(k));
            g.w.noalias() += cz * x.col(k).transpose();
            g.b += cz;
        }
        jloss *= jw * inv_b;
    }
    g.p = g.p.cwiseProduct(net.mask());
    return loss + jloss;
}

inline double inward_gradient(const ApproxNetwork& net, const Mat& pts, const std::vector<int>& faces,
                              double weight, double margin, Grad& g, Workspace& ws)
{
    const double inv = 1.0 / static_cast<double>(pts.cols());
    ws.z.noalias() = net.W() * pts;
    ws.z.colwise() += net.b();
    ws.s = net.sigma().value(ws.z);
    ws.r.noalias() = net.P() * ws.s;
    ws.r -= pts;
    double loss = 0.0;
    for (Eigen::Index j = 0; j < pts.cols(); ++j) {
        const int k = faces[j];
        const double h = margin - ws.r(k, j);
        ws.r.col(j).setZero();
        if (h > 0.0) {
            loss += weight * inv * h * h;
            ws.r(k, j) = -2.0 * weight * inv * h; // d(obj)/d(f_k)
        }
    }
    g.p.noalias() += (ws.r * ws.s.transpose()).cwiseProduct(net.mask());
    ws.dz.noalias() = net.P().transpose() * ws.r;
    ws.dz.array() *= 1.0 - ws.s.array().square();
    g.w.noalias() += ws.dz * pts.transpose();
    g.b += ws.dz.rowwise().sum();
    return loss;
}

} // namespace detail

/**
 * Mini-batch Adam on the mean squared loss (1/|S|) sum ||f(x_i) - y_i||^2.
 *
 * A validation set of round(validation_fraction * D) fresh samples (seed + 1) drives
 * early stopping; the parameters with the best validation loss are returned.
 * `target` is only consulted for the Jacobian penalty and the validation set.
 */
inline TrainResult train(const ApproxNetwork& init, const Dataset& data, const VectorField& target,
                         const TrainConfig& cfg)
{
    cfg.validate();
    require(data.size() >= 1, "train: empty dataset");
    require(data.dim() == init.n(), "train: dataset dimension differs from the network");
    require(cfg.batch_size <= data.size(), "train: batch larger than the dataset");

    TrainResult res;
    res.net = init;
    ApproxNetwork net = init;

    const int n_val = static_cast<int>(std::lround(cfg.validation_fraction * data.size()));
    Dataset val;
    if (n_val > 0)
        val = sample_dataset(target, cfg.domain, n_val, cfg.seed + 1);

    const bool use_jac = cfg.jacobian_penalty_weight > 0.0;
    Mat jac_all;
    if (use_jac)
        jac_all = detail::target_jacobians(target, data.x);

    std::vector<int> faces;
    Mat face_pts;
    if (cfg.inward_penalty_weight > 0.0)
        face_pts = detail::face_points(cfg.domain, cfg.inward_samples, cfg.seed + 2, faces);

    const double init_mse = mse(net, data.x, data.y);
    res.train_mse.push_back(init_mse);
    double best_val = n_val > 0 ? mse(net, val.x, val.y) : init_mse;
    res.val_mse.push_back(best_val);
    res.final_mse = init_mse;
    if (!std::isfinite(init_mse))
        throw NumericError("train: non-finite initial loss");

    detail::Grad g;
    detail::Workspace ws;
    const int n = net.n();
    Vec c = Vec::Zero(n), h = Vec::Ones(n);
    if (cfg.center_inputs) {
        c = 0.5 * (cfg.domain.lo + cfg.domain.hi);
        h = 0.5 * (cfg.domain.hi - cfg.domain.lo);
    }
    const Vec h_inv = h.cwiseInverse();
    // internal parameters
    Mat pt = net.P();
    Mat wt = net.W() * h.asDiagonal();
    Vec bt = net.b() + net.W() * c;
    Mat mp = Mat::Zero(n, net.hidden()), vp = mp;
    Mat mw = Mat::Zero(net.hidden(), n), vw = mw;
    Vec mb = Vec::Zero(net.hidden()), vb = mb;
    auto sync = [&] {
        Mat w = wt * h_inv.asDiagonal();
        Vec b = bt - w * c;
        net.set_parameters(pt, std::move(w), std::move(b));
    };

    std::vector<int> order(data.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);

    Mat xb(data.dim(), cfg.batch_size), yb(data.dim(), cfg.batch_size), jb;
    long step = 0;
    int since_best = 0;
    double lr = cfg.learning_rate;

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (int start = 0; start < data.size(); start += cfg.batch_size) {
            const int m = std::min(cfg.batch_size, data.size() - start);
            xb.resize(data.dim(), m);
            yb.resize(data.dim(), m);
            if (use_jac)
                jb.resize(jac_all.rows(), m);
            for (int k = 0; k < m; ++k) {
                xb.col(k) = data.x.col(order[start + k]);
                yb.col(k) = data.y.col(order[start + k]);
                if (use_jac)
                    jb.col(k) = jac_all.col(order[start + k]);
            }
            detail::batch_gradient(net, xb, yb, use_jac ? &jb : nullptr, cfg.jacobian_penalty_weight, g, ws);
            if (cfg.inward_penalty_weight > 0.0)
                detail::inward_gradient(net, face_pts, faces, cfg.inward_penalty_weight, cfg.inward_margin, g, ws);

            // chain to the internal coordinates: W = W~ H^-1, b = b~ - W~ H^-1 c
            const Mat gwt = g.w * h_inv.asDiagonal() - g.b * (h_inv.cwiseProduct(c)).transpose();

            ++step;
            const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
            const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
            auto adam = [&](auto& param, auto& m1, auto& m2, const auto& grad) {
                m1 = cfg.beta1 * m1 + (1.0 - cfg.beta1) * grad;
                m2 = cfg.beta2 * m2 + (1.0 - cfg.beta2) * grad.cwiseProduct(grad);
                param.array() -= lr * (m1.array() / c1) / ((m2.array() / c2).sqrt() + cfg.adam_eps);
            };
            adam(pt, mp, vp, g.p);
            adam(wt, mw, vw, gwt);
            adam(bt, mb, vb, g.b);
            pt = pt.cwiseProduct(net.mask());
            sync();
        }
        lr = cfg.cosine ? 0.5 * cfg.learning_rate * (1.0 + std::cos(M_PI * epoch / cfg.epochs)) : lr * cfg.lr_decay;

        const double tr = mse(net, data.x, data.y);
        res.train_mse.push_back(tr);
        res.epochs_run = epoch;
        if (!std::isfinite(tr) || tr > cfg.divergence_factor * init_mse) {
            res.status = TrainStatus::diverged;
            res.message = "training loss " + std::to_string(tr) + " exceeded " +
                          std::to_string(cfg.divergence_factor) + " x initial at epoch " + std::to_string(epoch);
            res.final_mse = tr;
            return res;
        }
        const double vl = n_val > 0 ? mse(net, val.x, val.y) : tr;
        res.val_mse.push_back(vl);
        if (vl < best_val) {
            best_val = vl;
            res.net = net;
            res.best_epoch = epoch;
            res.final_mse = tr;
            since_best = 0;
        } else if (++since_best >= cfg.patience) {
            res.status = TrainStatus::early_stopped;
            break;
        }
    }
    return res;
}

} // namespace seqdyn::approx

#include "meshattn/tape.hpp"

#include <cmath>

namespace meshattn {

namespace {

constexpr double kInvSqrt2 = 0.7071067811865475244;
constexpr double kInvSqrt2Pi = 0.3989422804014326779;

double gelu_value(double x) { return 0.5 * x * (1.0 + std::erf(x * kInvSqrt2)); }

double gelu_deriv(double x) {
    const double phi = 0.5 * (1.0 + std::erf(x * kInvSqrt2));
    const double pdf = kInvSqrt2Pi * std::exp(-0.5 * x * x);
    return phi + x * pdf;
}

}  // namespace

void Tape::check_finite(const Tensor& t, const char* op) const {
    if (debug_checks && !t.all_finite()) {
        raise(ErrorCode::NonFiniteValue, std::string("non-finite output of ") + op);
    }
}

Tape::Var Tape::push(Tensor value, bool requires_grad, std::function<void(Tape&)> back) {
    Node node;
    node.grad = Tensor::zeros_like(value);
    node.value = std::move(value);
    node.requires_grad = requires_grad;
    node.back = std::move(back);
    nodes_.push_back(std::move(node));
    return Var{static_cast<int>(nodes_.size()) - 1};
}

Tape::Var Tape::leaf(Tensor value, bool requires_grad) {
    check_finite(value, "leaf");
    return push(std::move(value), requires_grad, nullptr);
}

Tape::Var Tape::add(Var a, Var b) {
    const Tensor& av = value(a);
    const Tensor& bv = value(b);
    if (!av.same_shape(bv)) raise(ErrorCode::ShapeMismatch, "add: shapes differ");
    Tensor out = av;
    for (std::size_t i = 0; i < out.size(); ++i) out.data[i] += bv.data[i];
    check_finite(out, "add");
    const int aid = a.id, bid = b.id;
    Var result = push(std::move(out), needs(aid) || needs(bid), nullptr);
    const int oid = result.id;
    nodes_[oid].back = [aid, bid, oid](Tape& t) {
        const Tensor& g = t.nodes_[oid].grad;
        if (t.needs(aid)) {
            Tensor& ag = t.grad_ref(aid);
            for (std::size_t i = 0; i < g.size(); ++i) ag.data[i] += g.data[i];
        }
        if (t.needs(bid)) {
            Tensor& bg = t.grad_ref(bid);
            for (std::size_t i = 0; i < g.size(); ++i) bg.data[i] += g.data[i];
        }
    };
    return result;
}

Tape::Var Tape::matmul(Var x, Var w) {
    const Tensor& xv = value(x);
    const Tensor& wv = value(w);
    if (xv.cols() != wv.rows()) raise(ErrorCode::ShapeMismatch, "matmul: inner dims differ");
    const std::size_t n = xv.rows(), a = xv.cols(), b = wv.cols();
    Tensor out = Tensor::matrix(n, b);
    matmul_acc(xv.data.data(), wv.data.data(), out.data.data(), n, a, b);
    check_finite(out, "matmul");
    const int xid = x.id, wid = w.id;
    Var result = push(std::move(out), needs(xid) || needs(wid), nullptr);
    const int oid = result.id;
    nodes_[oid].back = [xid, wid, oid, n, a, b](Tape& t) {
        const Tensor& g = t.nodes_[oid].grad;
        if (t.needs(xid)) {
            matmul_nt_acc(g.data.data(), t.nodes_[wid].value.data.data(),
                          t.grad_ref(xid).data.data(), n, b, a);
        }
        if (t.needs(wid)) {
            matmul_tn_acc(t.nodes_[xid].value.data.data(), g.data.data(),
                          t.grad_ref(wid).data.data(), a, n, b);
        }
    };
    return result;
}

Tape::Var Tape::linear(Var x, Var w, Var bias) {
    const Tensor& xv = value(x);
    const Tensor& wv = value(w);
    const Tensor& bv = value(bias);
    if (xv.cols() != wv.rows() || bv.size() != wv.cols()) {
        raise(ErrorCode::ShapeMismatch, "linear: shape disagreement");
    }
    const std::size_t n = xv.rows(), a = xv.cols(), b = wv.cols();
    Tensor out = Tensor::matrix(n, b);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < b; ++j) out.at(i, j) = bv.data[j];
    }
    matmul_acc(xv.data.data(), wv.data.data(), out.data.data(), n, a, b);
    check_finite(out, "linear");
    const int xid = x.id, wid = w.id, bid = bias.id;
    Var result = push(std::move(out), needs(xid) || needs(wid) || needs(bid), nullptr);
    const int oid = result.id;
    nodes_[oid].back = [xid, wid, bid, oid, n, a, b](Tape& t) {
        const Tensor& g = t.nodes_[oid].grad;
        if (t.needs(xid)) {
            matmul_nt_acc(g.data.data(), t.nodes_[wid].value.data.data(),
                          t.grad_ref(xid).data.data(), n, b, a);
        }
        if (t.needs(wid)) {
            matmul_tn_acc(t.nodes_[xid].value.data.data(), g.data.data(),
                          t.grad_ref(wid).data.data(), a, n, b);
        }
        if (t.needs(bid)) {
            Tensor& bg = t.grad_ref(bid);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < b; ++j) bg.data[j] += g.at(i, j);
            }
        }
    };
    return result;
}

Tape::Var Tape::gelu(Var x) {
    const Tensor& xv = value(x);
    Tensor out = xv;
    for (double& v : out.data) v = gelu_value(v);
    check_finite(out, "gelu");
    const int xid = x.id;
    Var result = push(std::move(out), needs(xid), nullptr);
    const int oid = result.id;
    nodes_[oid].back = [xid, oid](Tape& t) {
        if (!t.needs(xid)) return;
        const Tensor& g = t.nodes_[oid].grad;
        const Tensor& xval = t.nodes_[xid].value;
        Tensor& xg = t.grad_ref(xid);
        for (std::size_t i = 0; i < g.size(); ++i) {
            xg.data[i] += g.data[i] * gelu_deriv(xval.data[i]);
        }
    };
    return result;
}

Tape::Var Tape::rmsnorm(Var x, Var gain, double eps) {
    const Tensor& xv = value(x);
    const Tensor& gv = value(gain);
    if (gv.size() != xv.cols()) raise(ErrorCode::ShapeMismatch, "rmsnorm: gain width mismatch");
    const std::size_t n = xv.rows(), d = xv.cols();
    Tensor out = Tensor::matrix(n, d);
    std::vector<double> inv_rms(n);
    for (std::size_t i = 0; i < n; ++i) {
        double ms = 0.0;
        for (std::size_t j = 0; j < d; ++j) ms += xv.at(i, j) * xv.at(i, j);
        ms = ms / static_cast<double>(d) + eps;
        inv_rms[i] = 1.0 / std::sqrt(ms);
        for (std::size_t j = 0; j < d; ++j) out.at(i, j) = xv.at(i, j) * inv_rms[i] * gv.data[j];
    }
    check_finite(out, "rmsnorm");
    const int xid = x.id, gid = gain.id;
    Var result = push(std::move(out), needs(xid) || needs(gid), nullptr);
    const int oid = result.id;
    nodes_[oid].back = [xid, gid, oid, n, d, inv_rms = std::move(inv_rms)](Tape& t) {
        const Tensor& g = t.nodes_[oid].grad;
        const Tensor& xval = t.nodes_[xid].value;
        const Tensor& gval = t.nodes_[gid].value;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = inv_rms[i];
            if (t.needs(xid)) {
                double dot = 0.0;
                for (std::size_t j = 0; j < d; ++j) dot += g.at(i, j) * gval.data[j] * xval.at(i, j);
                const double corr = dot * r * r * r / static_cast<double>(d);
                Tensor& xg = t.grad_ref(xid);
                for (std::size_t j = 0; j < d; ++j) {
                    xg.at(i, j) += g.at(i, j) * gval.data[j] * r - xval.at(i, j) * corr;
                }
            }
            if (t.needs(gid)) {
                Tensor& gg = t.grad_ref(gid);
                for (std::size_t j = 0; j < d; ++j) gg.data[j] += g.at(i, j) * xval.at(i, j) * r;
            }
        }
    };
    return result;
}

Tape::Var Tape::hadamard(Var a, Var b) {
    const Tensor& av = value(a);
    const Tensor& bv = value(b);
    if (!av.same_shape(bv)) raise(ErrorCode::ShapeMismatch, "hadamard: shapes differ");
    Tensor out = av;
    for (std::size_t i = 0; i < out.size(); ++i) out.data[i] *= bv.data[i];
    check_finite(out, "hadamard");
    const int aid = a.id, bid = b.id;
    Var result = push(std::move(out), needs(aid) || needs(bid), nullptr);
    const int oid = result.id;
    nodes_[oid].back = [aid, bid, oid](Tape& t) {
        const Tensor& g = t.nodes_[oid].grad;
        if (t.needs(aid)) {
            Tensor& ag = t.grad_ref(aid);
            const Tensor& bval = t.nodes_[bid].value;
            for (std::size_t i = 0; i < g.size(); ++i) ag.data[i] += g.data[i] * bval.data[i];
        }
        if (t.needs(bid)) {
            Tensor& bg = t.grad_ref(bid);
            const Tensor& aval = t.nodes_[aid].value;
            for (std::size_t i = 0; i < g.size(); ++i) bg.data[i] += g.data[i] * aval.data[i];
        }
    };
    return result;
}

Tape::Var Tape::masked_attention(Var q, Var k, Var v, const SparseMask& mask,
                                 AttentionMode mode) {
    const Tensor& qv = value(q);
    const Tensor& kv = value(k);
    const Tensor& vv = value(v);
    if (!qv.same_shape(kv) || !qv.same_shape(vv)) {
        raise(ErrorCode::ShapeMismatch, "masked_attention: Q/K/V shapes differ");
    }
    if (mask.num_rows != mask.num_cols || mask.num_rows != qv.rows()) {
        raise(ErrorCode::NonSquareMask, "masked_attention: mask must be square of size N");
    }
    const std::size_t n = qv.rows(), dh = qv.cols();
    const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
    const int qid = q.id, kid = k.id, vid = v.id;
    const SparseMask* mp = &mask;

    if (mode == AttentionMode::NeighborhoodSoftmax) {
        // Softmax over each row's support, stabilized by the row max.
        std::vector<double> weights(mask.nnz(), 0.0);
        Tensor out = Tensor::matrix(n, dh);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t deg = mask.row_nnz(i);
            if (deg == 0) continue;  // empty support outputs zero
            const std::uint32_t* cols = mask.row_begin(i);
            double* w = weights.data() + mask.row_offsets[i];
            double row_max = -1e300;
            for (std::size_t e = 0; e < deg; ++e) {
                double s = 0.0;
                for (std::size_t c = 0; c < dh; ++c) s += qv.at(i, c) * kv.at(cols[e], c);
                w[e] = s * scale;
                row_max = std::max(row_max, w[e]);
            }
            double denom = 0.0;
            for (std::size_t e = 0; e < deg; ++e) {
                w[e] = std::exp(w[e] - row_max);
                denom += w[e];
            }
            for (std::size_t e = 0; e < deg; ++e) {
                w[e] /= denom;
                for (std::size_t c = 0; c < dh; ++c) out.at(i, c) += w[e] * vv.at(cols[e], c);
            }
        }
        check_finite(out, "masked_attention");
        Var result = push(std::move(out), needs(qid) || needs(kid) || needs(vid), nullptr);
        const int oid = result.id;
        nodes_[oid].back = [qid, kid, vid, oid, mp, n, dh, scale,
                            weights = std::move(weights)](Tape& t) {
            const Tensor& g = t.nodes_[oid].grad;
            const Tensor& qval = t.nodes_[qid].value;
            const Tensor& kval = t.nodes_[kid].value;
            const Tensor& vval = t.nodes_[vid].value;
            Tensor& qg = t.grad_ref(qid);
            Tensor& kg = t.grad_ref(kid);
            Tensor& vg = t.grad_ref(vid);
            std::vector<double> dw;
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t deg = mp->row_nnz(i);
                if (deg == 0) continue;
                const std::uint32_t* cols = mp->row_begin(i);
                const double* w = weights.data() + mp->row_offsets[i];
                dw.assign(deg, 0.0);
                double wdw = 0.0;
                for (std::size_t e = 0; e < deg; ++e) {
                    double d = 0.0;
                    for (std::size_t c = 0; c < dh; ++c) d += g.at(i, c) * vval.at(cols[e], c);
                    dw[e] = d;
                    wdw += w[e] * d;
                    if (t.needs(vid)) {
                        for (std::size_t c = 0; c < dh; ++c) vg.at(cols[e], c) += w[e] * g.at(i, c);
                    }
                }
                for (std::size_t e = 0; e < deg; ++e) {
                    const double ds = w[e] * (dw[e] - wdw) * scale;
                    if (ds == 0.0) continue;
                    if (t.needs(qid)) {
                        for (std::size_t c = 0; c < dh; ++c) qg.at(i, c) += ds * kval.at(cols[e], c);
                    }
                    if (t.needs(kid)) {
                        for (std::size_t c = 0; c < dh; ++c) kg.at(cols[e], c) += ds * qval.at(i, c);
                    }
                }
            }
        };
        return result;
    }

    // DenseLiteral: full softmax first, Hadamard with the dense mask after.
    // O(N^2); retained so the two semantics stay measurable against each other.
    Tensor probs = Tensor::matrix(n, n);
    Tensor out = Tensor::matrix(n, dh);
    for (std::size_t i = 0; i < n; ++i) {
        double row_max = -1e300;
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t c = 0; c < dh; ++c) s += qv.at(i, c) * kv.at(j, c);
            probs.at(i, j) = s * scale;
            row_max = std::max(row_max, probs.at(i, j));
        }
        double denom = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            probs.at(i, j) = std::exp(probs.at(i, j) - row_max);
            denom += probs.at(i, j);
        }
        for (std::size_t j = 0; j < n; ++j) probs.at(i, j) /= denom;
        for (const std::uint32_t* j = mask.row_begin(i); j != mask.row_end(i); ++j) {
            for (std::size_t c = 0; c < dh; ++c) out.at(i, c) += probs.at(i, *j) * vv.at(*j, c);
        }
    }
    check_finite(out, "masked_attention");
    Var result = push(std::move(out), needs(qid) || needs(kid) || needs(vid), nullptr);
    const int oid = result.id;
    nodes_[oid].back = [qid, kid, vid, oid, mp, n, dh, scale, probs = std::move(probs)](Tape& t) {
        const Tensor& g = t.nodes_[oid].grad;
        const Tensor& qval = t.nodes_[qid].value;
        const Tensor& kval = t.nodes_[kid].value;
        const Tensor& vval = t.nodes_[vid].value;
        Tensor& qg = t.grad_ref(qid);
        Tensor& kg = t.grad_ref(kid);
        Tensor& vg = t.grad_ref(vid);
        std::vector<double> dp(n);
        for (std::size_t i = 0; i < n; ++i) {
            std::fill(dp.begin(), dp.end(), 0.0);
            for (const std::uint32_t* j = mp->row_begin(i); j != mp->row_end(i); ++j) {
                double d = 0.0;
                for (std::size_t c = 0; c < dh; ++c) d += g.at(i, c) * vval.at(*j, c);
                dp[*j] = d;
                if (t.needs(vid)) {
                    for (std::size_t c = 0; c < dh; ++c) vg.at(*j, c) += probs.at(i, *j) * g.at(i, c);
                }
            }
            double pdp = 0.0;
            for (std::size_t j = 0; j < n; ++j) pdp += probs.at(i, j) * dp[j];
            for (std::size_t j = 0; j < n; ++j) {
                const double ds = probs.at(i, j) * (dp[j] - pdp) * scale;
                if (ds == 0.0) continue;
                if (t.needs(qid)) {
                    for (std::size_t c = 0; c < dh; ++c) qg.at(i, c) += ds * kval.at(j, c);
                }
                if (t.needs(kid)) {
                    for (std::size_t c = 0; c < dh; ++c) kg.at(j, c) += ds * qval.at(i, c);
                }
            }
        }
    };
    return result;
}

Tape::Var Tape::slice_cols(Var x, std::size_t col0, std::size_t width) {
    const Tensor& xv = value(x);
    if (col0 + width > xv.cols()) raise(ErrorCode::ShapeMismatch, "slice_cols out of range");
    const std::size_t n = xv.rows(), p = xv.cols();
    Tensor out = Tensor::matrix(n, width);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < width; ++j) out.at(i, j) = xv.at(i, col0 + j);
    }
    const int xid = x.id;
    Var result = push(std::move(out), needs(xid), nullptr);
    const int oid = result.id;
    nodes_[oid].back = [xid, oid, col0, width, n, p](Tape& t) {
        if (!t.needs(xid)) return;
        const Tensor& g = t.nodes_[oid].grad;
        Tensor& xg = t.grad_ref(xid);
        (void)p;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < width; ++j) xg.at(i, col0 + j) += g.at(i, j);
        }
    };
    return result;
}

Tape::Var Tape::concat_cols(const std::vector<Var>& parts) {
    if (parts.empty()) raise(ErrorCode::ShapeMismatch, "concat_cols: no parts");
    const std::size_t n = value(parts[0]).rows();
    std::size_t total = 0;
    bool req = false;
    for (Var p : parts) {
        if (value(p).rows() != n) raise(ErrorCode::ShapeMismatch, "concat_cols: row mismatch");
        total += value(p).cols();
        req = req || needs(p.id);
    }
    Tensor out = Tensor::matrix(n, total);
    std::size_t off = 0;
    std::vector<int> ids;
    std::vector<std::size_t> widths;
    for (Var p : parts) {
        const Tensor& pv = value(p);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < pv.cols(); ++j) out.at(i, off + j) = pv.at(i, j);
        }
        ids.push_back(p.id);
        widths.push_back(pv.cols());
        off += pv.cols();
    }
    Var result = push(std::move(out), req, nullptr);
    const int oid = result.id;
    nodes_[oid].back = [oid, n, ids = std::move(ids), widths = std::move(widths)](Tape& t) {
        const Tensor& g = t.nodes_[oid].grad;
        std::size_t off = 0;
        for (std::size_t pi = 0; pi < ids.size(); ++pi) {
            if (t.needs(ids[pi])) {
                Tensor& pg = t.grad_ref(ids[pi]);
                for (std::size_t i = 0; i < n; ++i) {
                    for (std::size_t j = 0; j < widths[pi]; ++j) pg.at(i, j) += g.at(i, off + j);
                }
            }
            off += widths[pi];
        }
    };
    return result;
}

Tape::Var Tape::apply_mask_token(Var x, Var token, const std::vector<std::uint8_t>& row_mask,
                                 std::size_t col0) {
    const Tensor& xv = value(x);
    const Tensor& tv = value(token);
    const std::size_t n = xv.rows(), w = tv.size();
    if (row_mask.size() != n || col0 + w > xv.cols()) {
        raise(ErrorCode::ShapeMismatch, "apply_mask_token: bad row mask or token width");
    }
    Tensor out = xv;
    for (std::size_t i = 0; i < n; ++i) {
        if (!row_mask[i]) continue;
        for (std::size_t j = 0; j < w; ++j) out.at(i, col0 + j) = tv.data[j];
    }
    const int xid = x.id, tid = token.id;
    Var result = push(std::move(out), needs(xid) || needs(tid), nullptr);
    const int oid = result.id;
    nodes_[oid].back = [xid, tid, oid, col0, w, n, row_mask](Tape& t) {
        const Tensor& g = t.nodes_[oid].grad;
        const std::size_t p = g.cols();
        if (t.needs(xid)) {
            Tensor& xg = t.grad_ref(xid);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < p; ++j) {
                    if (row_mask[i] && j >= col0 && j < col0 + w) continue;
                    xg.at(i, j) += g.at(i, j);
                }
            }
        }
        if (t.needs(tid)) {
            Tensor& tg = t.grad_ref(tid);
            for (std::size_t i = 0; i < n; ++i) {
                if (!row_mask[i]) continue;
                for (std::size_t j = 0; j < w; ++j) tg.data[j] += g.at(i, col0 + j);
            }
        }
    };
    return result;
}

Tape::Var Tape::sum(Var x) {
    const Tensor& xv = value(x);
    double total = 0.0;
    for (double v : xv.data) total += v;
    Tensor out({1});
    out.data[0] = total;
    const int xid = x.id;
    Var result = push(std::move(out), needs(xid), nullptr);
    const int oid = result.id;
    nodes_[oid].back = [xid, oid](Tape& t) {
        if (!t.needs(xid)) return;
        const double g = t.nodes_[oid].grad.data[0];
        Tensor& xg = t.grad_ref(xid);
        for (double& v : xg.data) v += g;
    };
    return result;
}

Tape::Var Tape::scale(Var x, double c) {
    Tensor out = value(x);
    for (double& v : out.data) v *= c;
    const int xid = x.id;
    Var result = push(std::move(out), needs(xid), nullptr);
    const int oid = result.id;
    nodes_[oid].back = [xid, oid, c](Tape& t) {
        if (!t.needs(xid)) return;
        const Tensor& g = t.nodes_[oid].grad;
        Tensor& xg = t.grad_ref(xid);
        for (std::size_t i = 0; i < g.size(); ++i) xg.data[i] += g.data[i] * c;
    };
    return result;
}

Tape::Var Tape::mse(Var pred, const Tensor& target) {
    const Tensor& pv = value(pred);
    if (!pv.same_shape(target)) raise(ErrorCode::ShapeMismatch, "mse: shapes differ");
    const double inv_m = 1.0 / static_cast<double>(pv.size());
    double total = 0.0;
    for (std::size_t i = 0; i < pv.size(); ++i) {
        const double d = pv.data[i] - target.data[i];
        total += d * d;
    }
    Tensor out({1});
    out.data[0] = total * inv_m;
    const int pid = pred.id;
    Var result = push(std::move(out), needs(pid), nullptr);
    const int oid = result.id;
    nodes_[oid].back = [pid, oid, inv_m, target](Tape& t) {
        if (!t.needs(pid)) return;
        const double g = t.nodes_[oid].grad.data[0];
        const Tensor& pv = t.nodes_[pid].value;
        Tensor& pg = t.grad_ref(pid);
        for (std::size_t i = 0; i < pv.size(); ++i) {
            pg.data[i] += g * 2.0 * inv_m * (pv.data[i] - target.data[i]);
        }
    };
    return result;
}

Tape::Var Tape::mse_rows(Var pred, const Tensor& target,
                         const std::vector<std::uint8_t>& row_mask) {
    const Tensor& pv = value(pred);
    if (!pv.same_shape(target)) raise(ErrorCode::ShapeMismatch, "mse_rows: shapes differ");
    if (row_mask.size() != pv.rows()) raise(ErrorCode::ShapeMismatch, "mse_rows: row mask size");
    std::size_t active = 0;
    for (std::uint8_t f : row_mask) active += f ? 1 : 0;
    if (active == 0) raise(ErrorCode::NoMaskedNodes, "mse_rows: loss over empty node set");
    const std::size_t c = pv.cols();
    const double inv_m = 1.0 / static_cast<double>(active * c);
    double total = 0.0;
    for (std::size_t i = 0; i < pv.rows(); ++i) {
        if (!row_mask[i]) continue;
        for (std::size_t j = 0; j < c; ++j) {
            const double d = pv.at(i, j) - target.at(i, j);
            total += d * d;
        }
    }
    Tensor out({1});
    out.data[0] = total * inv_m;
    const int pid = pred.id;
    Var result = push(std::move(out), needs(pid), nullptr);
    const int oid = result.id;
    nodes_[oid].back = [pid, oid, inv_m, c, target, row_mask](Tape& t) {
        if (!t.needs(pid)) return;
        const double g = t.nodes_[oid].grad.data[0];
        const Tensor& pv = t.nodes_[pid].value;
        Tensor& pg = t.grad_ref(pid);
        for (std::size_t i = 0; i < pv.rows(); ++i) {
            if (!row_mask[i]) continue;
            for (std::size_t j = 0; j < c; ++j) {
                pg.at(i, j) += g * 2.0 * inv_m * (pv.at(i, j) - target.at(i, j));
            }
        }
    };
    return result;
}

void Tape::backward(Var scalar_loss) {
    if (value(scalar_loss).size() != 1) {
        raise(ErrorCode::ShapeMismatch, "backward expects a scalar loss");
    }
    nodes_[scalar_loss.id].grad.data[0] = 1.0;
    for (int i = scalar_loss.id; i >= 0; --i) {
        if (nodes_[i].back && nodes_[i].requires_grad) nodes_[i].back(*this);
    }
}

}  // namespace meshattn

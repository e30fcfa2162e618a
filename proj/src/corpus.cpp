#include "seqlsh/corpus.hpp"

#include "seqlsh/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

namespace seqlsh {

namespace {

[[noreturn]] void bad_line(std::size_t lineno, const std::string& why) {
    throw parse_error("line " + std::to_string(lineno) + ": " + why);
}

} // namespace

std::vector<SparseVector> ingest(std::istream& in, CorpusFormat format) {
    std::vector<SparseVector> corpus;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            bad_line(lineno, "missing tab separator");
        }
        SparseVector v;
        try {
            v.id = std::stoull(line.substr(0, tab));
        } catch (const std::exception&) {
            bad_line(lineno, "malformed id");
        }
        std::istringstream rest(line.substr(tab + 1));
        std::string token;
        while (rest >> token) {
            std::uint32_t dim = 0;
            double weight = 1.0;
            const auto colon = token.find(':');
            try {
                if (format == CorpusFormat::SetTsv) {
                    if (colon != std::string::npos) {
                        bad_line(lineno, "weighted entry in set-tsv corpus");
                    }
                    dim = static_cast<std::uint32_t>(std::stoul(token));
                } else {
                    if (colon == std::string::npos) {
                        bad_line(lineno, "missing ':' in weighted entry");
                    }
                    dim = static_cast<std::uint32_t>(std::stoul(token.substr(0, colon)));
                    weight = std::stod(token.substr(colon + 1));
                }
            } catch (const parse_error&) {
                throw;
            } catch (const std::exception&) {
                bad_line(lineno, "malformed entry '" + token + "'");
            }
            if (weight < 0.0) {
                bad_line(lineno, "negative weight");
            }
            v.entries.emplace_back(dim, weight);
        }
        if (v.entries.empty()) {
            bad_line(lineno, "vector has no entries");
        }
        std::sort(v.entries.begin(), v.entries.end());
        for (std::size_t i = 1; i < v.entries.size(); ++i) {
            if (v.entries[i].first == v.entries[i - 1].first) {
                bad_line(lineno, "duplicate dimension " + std::to_string(v.entries[i].first));
            }
        }
        corpus.push_back(std::move(v));
    }
    return corpus;
}

std::vector<SparseVector> ingest(const std::string& path, CorpusFormat format) {
    std::ifstream in(path);
    if (!in) {
        throw parse_error("cannot open corpus file " + path);
    }
    return ingest(in, format);
}

void write_corpus(std::ostream& out, const std::vector<SparseVector>& corpus,
                  CorpusFormat format) {
    out.precision(std::numeric_limits<double>::max_digits10);
    for (const auto& v : corpus) {
        out << v.id << '\t';
        bool first = true;
        for (const auto& [d, w] : v.entries) {
            if (!first) out << ' ';
            first = false;
            if (format == CorpusFormat::SetTsv) {
                out << d;
            } else {
                out << d << ':' << w;
            }
        }
        out << '\n';
    }
}

namespace {

// Shared/extra split realizing J = c/u exactly with u - c even.
void jaccard_split(double target, int& shared, int& extra) {
    const int u = 40;
    int c = static_cast<int>(std::lround(target * u));
    c = std::clamp(c, 1, u - 2);
    if ((u - c) % 2 != 0) ++c;
    shared = c;
    extra = (u - c) / 2;
}

} // namespace

SynthResult synth(const SynthSpec& spec) {
    for (const auto& level : spec.levels) {
        if (!(level.similarity > 0.0 && level.similarity <= 1.0)) {
            throw config_error("planted similarity must be in (0, 1]");
        }
    }
    std::mt19937_64 rng(spec.seed);
    SynthResult out;
    std::uint64_t next_id = 0;
    std::uint32_t next_dim = 1000000; // planted pairs live on private dimensions

    for (const auto& level : spec.levels) {
        for (int p = 0; p < level.count; ++p) {
            SparseVector x, y;
            x.id = next_id++;
            y.id = next_id++;
            double actual = level.similarity;
            if (spec.measure == Measure::Jaccard) {
                int shared = 0, extra = 0;
                jaccard_split(level.similarity, shared, extra);
                actual = static_cast<double>(shared) /
                         static_cast<double>(shared + 2 * extra);
                for (int i = 0; i < shared; ++i) {
                    const std::uint32_t d = next_dim++;
                    x.entries.emplace_back(d, 1.0);
                    y.entries.emplace_back(d, 1.0);
                }
                for (int i = 0; i < extra; ++i) x.entries.emplace_back(next_dim++, 1.0);
                for (int i = 0; i < extra; ++i) y.entries.emplace_back(next_dim++, 1.0);
            } else {
                // y = cos(theta)*v + sin(theta)*u with u on disjoint dims, u _|_ v.
                const int nnz = 20;
                std::uniform_real_distribution<double> weight(0.2, 1.0);
                std::vector<double> v(nnz), u(nnz);
                double nv = 0.0, nu = 0.0;
                for (int i = 0; i < nnz; ++i) {
                    v[static_cast<std::size_t>(i)] = weight(rng);
                    u[static_cast<std::size_t>(i)] = weight(rng);
                    nv += v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)];
                    nu += u[static_cast<std::size_t>(i)] * u[static_cast<std::size_t>(i)];
                }
                nv = std::sqrt(nv);
                nu = std::sqrt(nu);
                const double c = level.similarity;
                const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
                for (int i = 0; i < nnz; ++i) {
                    const std::uint32_t d = next_dim++;
                    const double vi = v[static_cast<std::size_t>(i)] / nv;
                    x.entries.emplace_back(d, vi);
                    if (c * vi > 0.0) y.entries.emplace_back(d, c * vi);
                }
                for (int i = 0; i < nnz; ++i) {
                    const std::uint32_t d = next_dim++;
                    const double ui = u[static_cast<std::size_t>(i)] / nu;
                    if (s * ui > 0.0) y.entries.emplace_back(d, s * ui);
                }
                actual = cosine_similarity(x, y);
            }
            out.planted.push_back({x.id, y.id, actual});
            out.corpus.push_back(std::move(x));
            out.corpus.push_back(std::move(y));
        }
    }

    // Background noise: random sets over a shared pool, low pairwise overlap.
    std::uniform_int_distribution<std::uint32_t> pool(0, 99999);
    std::uniform_real_distribution<double> weight(0.2, 1.0);
    for (int i = 0; i < spec.noise_vectors; ++i) {
        SparseVector v;
        v.id = next_id++;
        std::vector<std::uint32_t> dims;
        while (dims.size() < 30) {
            dims.push_back(pool(rng));
            std::sort(dims.begin(), dims.end());
            dims.erase(std::unique(dims.begin(), dims.end()), dims.end());
        }
        for (std::uint32_t d : dims) {
            v.entries.emplace_back(d, spec.measure == Measure::Jaccard ? 1.0 : weight(rng));
        }
        out.corpus.push_back(std::move(v));
    }
    return out;
}

std::vector<OraclePair> oracle_allpairs(const std::vector<SparseVector>& corpus, double t,
                                        Measure measure) {
    std::vector<OraclePair> out;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        for (std::size_t j = i + 1; j < corpus.size(); ++j) {
            const double sim = exact_similarity(corpus[i], corpus[j], measure);
            if (sim >= t) {
                std::uint64_t a = corpus[i].id, b = corpus[j].id;
                if (a > b) std::swap(a, b);
                out.push_back({a, b, sim});
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const OraclePair& x, const OraclePair& y) {
        return std::pair{x.a, x.b} < std::pair{y.a, y.b};
    });
    return out;
}

} // namespace seqlsh

#include "esoccp/io.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace esoccp {

namespace {

Matrix matrix_from_json(const Json& j, int rows, int cols, const char* name) {
    Matrix m(rows, cols);
    if (!j.is_array()) throw std::invalid_argument(std::string(name) + ": expected an array");
    if (!j.empty() && j.front().is_array()) {
        if (static_cast<int>(j.size()) != rows)
            throw std::invalid_argument(std::string(name) + ": wrong row count");
        for (int i = 0; i < rows; ++i) {
            const auto& row = j.at(static_cast<std::size_t>(i));
            if (static_cast<int>(row.size()) != cols)
                throw std::invalid_argument(std::string(name) + ": wrong column count");
            for (int c = 0; c < cols; ++c) m(i, c) = row.at(static_cast<std::size_t>(c)).get<double>();
        }
        return m;
    }
    if (static_cast<int>(j.size()) != rows * cols)
        throw std::invalid_argument(std::string(name) + ": flat array has wrong length");
    for (int i = 0; i < rows; ++i)
        for (int c = 0; c < cols; ++c)
            m(i, c) = j.at(static_cast<std::size_t>(i * cols + c)).get<double>();
    return m;
}

Vector vector_from_json(const Json& j, int size, const char* name) {
    if (!j.is_array() || static_cast<int>(j.size()) != size)
        throw std::invalid_argument(std::string(name) + ": wrong vector length");
    Vector v(size);
    for (int i = 0; i < size; ++i) v(i) = j.at(static_cast<std::size_t>(i)).get<double>();
    return v;
}

Json matrix_to_json(const Matrix& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(i, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Json vector_to_json(const Vector& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

// "A[0][1]", "p[2]" -> block + indices.
Perturbation parse_target(const std::string& target) {
    Perturbation p;
    if (target.empty()) throw std::invalid_argument("perturbation target is empty");
    const char b = target[0];
    switch (b) {
        case 'A': p.block = Perturbation::Block::A; break;
        case 'B': p.block = Perturbation::Block::B; break;
        case 'C': p.block = Perturbation::Block::C; break;
        case 'D': p.block = Perturbation::Block::D; break;
        case 'p': p.block = Perturbation::Block::p; break;
        case 'q': p.block = Perturbation::Block::q; break;
        default: throw std::invalid_argument("unknown perturbation block in '" + target + "'");
    }
    int idx[2] = {0, 0};
    int found = 0;
    std::size_t pos = 1;
    while (pos < target.size() && found < 2) {
        if (target[pos] != '[') throw std::invalid_argument("bad perturbation target: " + target);
        const auto close = target.find(']', pos);
        if (close == std::string::npos)
            throw std::invalid_argument("bad perturbation target: " + target);
        idx[found++] = std::stoi(target.substr(pos + 1, close - pos - 1));
        pos = close + 1;
    }
    const bool is_vec = (b == 'p' || b == 'q');
    if (found != (is_vec ? 1 : 2))
        throw std::invalid_argument("perturbation target has wrong index count: " + target);
    p.i = idx[0];
    p.j = idx[1];
    return p;
}

} // namespace

EsoclcpInstance esoclcp_from_json(const Json& j) {
    const int k = j.at("k").get<int>();
    const int l = j.at("l").get<int>();
    return EsoclcpInstance(matrix_from_json(j.at("A"), k, k, "A"),
                           matrix_from_json(j.at("B"), k, l, "B"),
                           matrix_from_json(j.at("C"), l, k, "C"),
                           matrix_from_json(j.at("D"), l, l, "D"),
                           vector_from_json(j.at("p"), k, "p"),
                           vector_from_json(j.at("q"), l, "q"));
}

Json esoclcp_to_json(const EsoclcpInstance& inst) {
    Json j;
    j["k"] = inst.k;
    j["l"] = inst.l;
    j["A"] = matrix_to_json(inst.A);
    j["B"] = matrix_to_json(inst.B);
    j["C"] = matrix_to_json(inst.C);
    j["D"] = matrix_to_json(inst.D);
    j["p"] = vector_to_json(inst.p);
    j["q"] = vector_to_json(inst.q);
    return j;
}

EsoclcpInstance load_esoclcp(const std::string& path) {
    return esoclcp_from_json(Json::parse(read_file(path)));
}

ScenarioModel scenario_model_from_json(const Json& j, const std::string& base_dir) {
    ScenarioModel model;
    const auto& base = j.at("base");
    if (base.is_string()) {
        auto p = std::filesystem::path(base.get<std::string>());
        if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
        model.base = load_esoclcp(p.string());
    } else {
        model.base = esoclcp_from_json(base);
    }
    for (const auto& pj : j.at("perturbations")) {
        Perturbation p = parse_target(pj.at("target").get<std::string>());
        if (pj.contains("dist") && pj.at("dist").get<std::string>() != "normal")
            throw std::invalid_argument("only normal perturbations are supported");
        p.mean = pj.value("mean", 0.0);
        p.sd = pj.value("sd", 1.0);
        p.scale = pj.value("scale", 1.0);
        model.perturbations.push_back(p);
    }
    model.seed = j.value("seed", std::uint64_t{0});
    return model;
}

ScenarioModel load_scenario_model(const std::string& path) {
    const auto dir = std::filesystem::path(path).parent_path().string();
    return scenario_model_from_json(Json::parse(read_file(path)), dir);
}

PortfolioInstance load_portfolio_csv(const std::string& path, double c0) {
    std::istringstream in(read_file(path));
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("empty returns file: " + path);
    // header "scenario,prob,asset1..assetN"
    int n_assets = -2;
    {
        std::istringstream hs(line);
        std::string tok;
        while (std::getline(hs, tok, ',')) ++n_assets;
    }
    if (n_assets < 2) throw std::invalid_argument("returns header needs at least two assets");

    std::vector<double> probs;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tok;
        std::getline(ls, tok, ','); // scenario label
        std::getline(ls, tok, ',');
        probs.push_back(std::stod(tok));
        std::vector<double> row;
        while (std::getline(ls, tok, ',')) row.push_back(std::stod(tok));
        if (static_cast<int>(row.size()) != n_assets)
            throw std::invalid_argument("returns row has wrong asset count");
        rows.push_back(std::move(row));
    }
    const int T = static_cast<int>(rows.size());
    Matrix R(n_assets, T);
    Vector f(T);
    for (int jcol = 0; jcol < T; ++jcol) {
        f(jcol) = probs[static_cast<std::size_t>(jcol)];
        for (int i = 0; i < n_assets; ++i)
            R(i, jcol) = rows[static_cast<std::size_t>(jcol)][static_cast<std::size_t>(i)];
    }
    return PortfolioInstance(std::move(R), std::move(f), c0);
}

PortfolioInstance portfolio_from_json(const Json& j, std::optional<double> c0_override) {
    const auto& rj = j.at("R");
    const int n = static_cast<int>(rj.size());
    const int T = static_cast<int>(rj.front().size());
    Matrix R = matrix_from_json(rj, n, T, "R");
    Vector f = vector_from_json(j.at("f"), T, "f");
    const double c0 = c0_override.value_or(j.value("c0", 1.0));
    return PortfolioInstance(std::move(R), std::move(f), c0);
}

PortfolioInstance load_portfolio(const std::string& path, std::optional<double> c0_flag) {
    const std::string body = read_file(path);
    const auto trimmed = body.find_first_not_of(" \t\r\n");
    if (trimmed != std::string::npos && body[trimmed] == '{')
        return portfolio_from_json(Json::parse(body), c0_flag);
    return load_portfolio_csv(path, c0_flag.value_or(1.0));
}

Matrix load_matrix(const std::string& path) {
    const std::string body = read_file(path);
    const auto first = body.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && (body[first] == '[' || body[first] == '{')) {
        Json j = Json::parse(body);
        const Json& mj = j.is_object() ? j.at("matrix") : j;
        const int rows = static_cast<int>(mj.size());
        const int cols = static_cast<int>(mj.front().size());
        return matrix_from_json(mj, rows, cols, "matrix");
    }
    // whitespace text: one row per line
    std::istringstream in(body);
    std::string line;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::vector<double> row;
        double v;
        while (ls >> v) row.push_back(v);
        if (!row.empty()) rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::invalid_argument("matrix file is empty: " + path);
    Matrix m(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows.front().size())
            throw std::invalid_argument("ragged matrix rows in " + path);
        for (std::size_t c = 0; c < rows[i].size(); ++c)
            m(static_cast<int>(i), static_cast<int>(c)) = rows[i][c];
    }
    return m;
}

Json verdict_to_json(const QcVerdict& verdict) {
    Json j;
    j["verdict"] = to_string(verdict.verdict);
    if (verdict.certificate) {
        j["certificate"] = to_string(*verdict.certificate);
        if (verdict.rho) j["rho"] = *verdict.rho;
    }
    if (verdict.witness) {
        Json w;
        w["a0"] = vector_to_json(verdict.witness->a0);
        w["a1"] = vector_to_json(verdict.witness->a1);
        w["midpoint"] = vector_to_json(Vector(0.5 * (verdict.witness->a0 + verdict.witness->a1)));
        w["level"] = verdict.witness->level;
        w["margin"] = verdict.witness->margin;
        j["witness"] = std::move(w);
    }
    if (!verdict.diagnostics.empty()) j["diagnostics"] = verdict.diagnostics;
    return j;
}

Json saa_report_to_json(const SaaReport& report) {
    Json stages = Json::array();
    for (const auto& s : report.stages) {
        Json row;
        row["stage"] = s.stage;
        row["N"] = s.sample_size;
        row["solution"] = vector_to_json((Vector(s.x.size() + s.u.size()) << s.x, s.u).finished());
        row["ztilde"] = vector_to_json(s.ztilde);
        row["theta"] = s.theta;
        row["objective"] = s.objective;
        row["aloc"] = s.aloc;
        row["mean_abs_gap"] = s.mean_abs_gap;
        row["runtime_sec"] = s.runtime_sec;
        row["inner_iterations"] = s.inner_iterations;
        row["status"] = to_string(s.status);
        stages.push_back(std::move(row));
    }
    Json j;
    j["stages"] = std::move(stages);
    j["solution"] = vector_to_json((Vector(report.x.size() + report.u.size()) << report.x,
                                    report.u)
                                       .finished());
    j["theta"] = report.theta;
    j["outer_converged"] = report.outer_converged;
    return j;
}

Json verify_report_to_json(const VerifyReport& rep) {
    Json j;
    j["in_L"] = rep.in_L;
    j["in_M"] = rep.in_M;
    j["l_violation"] = rep.l_violation;
    j["m_violation"] = rep.m_violation;
    j["gap"] = rep.gap;
    j["pass"] = rep.pass;
    return j;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot write file: " + path);
    out << content;
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

Json manifest_to_json(const RunManifest& m) {
    Json inputs = Json::object();
    for (const auto& [path, digest] : m.input_digests) inputs[path] = digest;
    Json j;
    j["command"] = m.command;
    j["inputs"] = std::move(inputs);
    j["seed"] = m.seed;
    j["config"] = m.config;
    j["version"] = m.version;
    j["wall_clock_sec"] = m.wall_clock_sec;
    return j;
}

} // namespace esoccp

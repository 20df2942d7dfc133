#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "sgm/baselines.hpp"
#include "sgm/bench.hpp"

namespace sgm::bench {

const char* const kTrialHeader = "function,algorithm,trial,seed,generations,evaluations,best_f,best_x,sd,wallclock_ms";
const char* const kSummaryHeader = "function,algorithm,trials,median_best_f,mean_generations,success_rate,png";

namespace {

std::string num(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string join_point(const Point& p)
{
    std::string s;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i)
            s += ';';
        s += num(p[i]);
    }
    return s;
}

/// Writes via a sibling temp file so readers never see a partial file.
class AtomicFile {
public:
    explicit AtomicFile(std::filesystem::path path) : path_(std::move(path)), tmp_(path_)
    {
        tmp_ += ".tmp";
        out_.open(tmp_, std::ios::binary | std::ios::trunc);
        if (!out_)
            throw IoError("cannot write " + tmp_.string());
    }
    ~AtomicFile()
    {
        if (!committed_) {
            out_.close();
            std::error_code ec;
            std::filesystem::remove(tmp_, ec);
        }
    }
    AtomicFile(const AtomicFile&) = delete;
    AtomicFile& operator=(const AtomicFile&) = delete;

    std::ostream& stream() { return out_; }

    /// Flushes and checks; the rename happens in commit().
    void close()
    {
        out_.close();
        if (!out_)
            throw IoError("write failed for " + tmp_.string());
    }
    void commit()
    {
        std::error_code ec;
        std::filesystem::rename(tmp_, path_, ec);
        if (ec)
            throw IoError("cannot replace " + path_.string() + ": " + ec.message());
        committed_ = true;
    }

private:
    std::filesystem::path path_;
    std::filesystem::path tmp_;
    std::ofstream out_;
    bool committed_ = false;
};

std::vector<std::string> split(const std::string& line, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream ss(line);
    while (std::getline(ss, cur, sep))
        out.push_back(cur);
    if (!line.empty() && line.back() == sep)
        out.emplace_back();
    return out;
}

double to_double(const std::string& s, const std::string& where)
{
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || *end != '\0')
        throw IoError(where + ": bad number '" + s + "'");
    return v;
}

unsigned long long to_unsigned(const std::string& s, const std::string& where)
{
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (s.empty() || *end != '\0' || s.front() == '-')
        throw IoError(where + ": bad integer '" + s + "'");
    return v;
}

std::vector<std::vector<std::string>> read_rows(const std::filesystem::path& path, const char* header,
                                                std::size_t fields)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != header)
        throw IoError(path.string() + ": unexpected header");
    std::vector<std::vector<std::string>> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        auto cells = split(line, ',');
        if (cells.size() != fields)
            throw IoError(path.string() + ":" + std::to_string(lineno) + ": expected " + std::to_string(fields) +
                          " fields");
        rows.push_back(std::move(cells));
    }
    return rows;
}

nlohmann::json point_json(const Point& p)
{
    return nlohmann::json(p.coords());
}

} // namespace

void emit_csv(const Report& report, const std::filesystem::path& path)
{
    std::filesystem::path summary = path.parent_path() / (path.stem().string() + "_summary.csv");

    AtomicFile trials(path);
    trials.stream() << kTrialHeader << '\n';
    for (const auto& r : report.trials) {
        trials.stream() << r.function << ',' << r.algorithm << ',' << r.trial << ',' << r.seed << ','
                        << r.generations << ',' << r.evaluations << ',' << num(r.best_f) << ','
                        << join_point(r.best_x) << ',' << num(r.sd) << ',' << num(r.wallclock_ms) << '\n';
    }
    trials.close();

    AtomicFile agg(summary);
    agg.stream() << kSummaryHeader << '\n';
    for (const auto& a : report.aggregates) {
        agg.stream() << a.function << ',' << a.algorithm << ',' << a.trials << ',' << num(a.median_best_f) << ','
                     << num(a.mean_generations) << ',' << num(a.success_rate) << ','
                     << (a.png ? std::to_string(*a.png) : std::string()) << '\n';
    }
    agg.close();

    trials.commit();
    agg.commit();
}

void emit_json(const Report& report, const std::filesystem::path& path)
{
    nlohmann::json j;
    j["trials"] = nlohmann::json::array();
    for (const auto& r : report.trials) {
        j["trials"].push_back({{"function", r.function},
                               {"algorithm", r.algorithm},
                               {"trial", r.trial},
                               {"seed", r.seed},
                               {"generations", r.generations},
                               {"evaluations", r.evaluations},
                               {"best_f", r.best_f},
                               {"best_x", point_json(r.best_x)},
                               {"sd", r.sd},
                               {"wallclock_ms", r.wallclock_ms}});
    }
    j["aggregates"] = nlohmann::json::array();
    for (const auto& a : report.aggregates) {
        j["aggregates"].push_back({{"function", a.function},
                                   {"algorithm", a.algorithm},
                                   {"trials", a.trials},
                                   {"median_best_f", a.median_best_f},
                                   {"mean_generations", a.mean_generations},
                                   {"success_rate", a.success_rate},
                                   {"png", a.png ? nlohmann::json(*a.png) : nlohmann::json(nullptr)}});
    }
    nlohmann::json ref = nlohmann::json::array();
    for (const auto& row : baselines::reference_table())
        ref.push_back({{"algorithm", row.algorithm}, {"generations", row.gens}});
    j["reference"] = ref;
    j["reference_png"] = reference_png_row();

    AtomicFile f(path);
    f.stream() << j.dump(2) << '\n';
    f.close();
    f.commit();
}

std::vector<TrialRow> read_trials_csv(const std::filesystem::path& path)
{
    std::vector<TrialRow> out;
    for (const auto& c : read_rows(path, kTrialHeader, 10)) {
        const std::string where = path.string();
        TrialRow r;
        r.function = c[0];
        r.algorithm = c[1];
        r.trial = to_unsigned(c[2], where);
        r.seed = to_unsigned(c[3], where);
        r.generations = to_unsigned(c[4], where);
        r.evaluations = to_unsigned(c[5], where);
        r.best_f = to_double(c[6], where);
        std::vector<double> xs;
        if (!c[7].empty()) {
            for (const auto& x : split(c[7], ';'))
                xs.push_back(to_double(x, where));
        }
        r.best_x = Point(std::move(xs));
        r.sd = to_double(c[8], where);
        r.wallclock_ms = to_double(c[9], where);
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<AggregateRow> read_summary_csv(const std::filesystem::path& path)
{
    std::vector<AggregateRow> out;
    for (const auto& c : read_rows(path, kSummaryHeader, 7)) {
        const std::string where = path.string();
        AggregateRow a;
        a.function = c[0];
        a.algorithm = c[1];
        a.trials = to_unsigned(c[2], where);
        a.median_best_f = to_double(c[3], where);
        a.mean_generations = to_double(c[4], where);
        a.success_rate = to_double(c[5], where);
        if (!c[6].empty())
            a.png = static_cast<long>(to_unsigned(c[6], where));
        out.push_back(std::move(a));
    }
    return out;
}

bool emit_svg_trace(const Objective& obj, const std::vector<subdivision::RoundSnapshot>& rounds,
                    const std::vector<TraceEntry>& trace, const std::filesystem::path& path)
{
    if (obj.dim != 2)
        return false;
    const BoxDomain& box = obj.domain;
    constexpr double size = 600.0, pad = 30.0;
    const double sx = (size - 2 * pad) / box.extent(0);
    const double sy = (size - 2 * pad) / box.extent(1);
    auto X = [&](double x) { return num(pad + (x - box.lo()[0]) * sx); };
    auto Y = [&](double y) { return num(size - pad - (y - box.lo()[1]) * sy); };

    AtomicFile f(path);
    std::ostream& o = f.stream();
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size << "\">\n";
    o << "<title>" << obj.name << "</title>\n";
    o << "<rect x=\"" << pad << "\" y=\"" << pad << "\" width=\"" << size - 2 * pad << "\" height=\""
      << size - 2 * pad << "\" fill=\"none\" stroke=\"black\"/>\n";

    for (const auto& snap : rounds) {
        o << "<g class=\"round\" data-round=\"" << snap.round << "\">\n";
        for (std::size_t c = 0; c < snap.cells.size(); ++c) {
            const auto& cell = snap.cells[c];
            const bool chosen = c == snap.selected;
            o << "<rect x=\"" << X(cell.base[0]) << "\" y=\"" << Y(cell.base[1] + cell.step[1]) << "\" width=\""
              << num(cell.step[0] * sx) << "\" height=\"" << num(cell.step[1] * sy) << "\" fill=\"none\" stroke=\""
              << (chosen ? "steelblue" : "lightgray") << "\"/>\n";
            if (!chosen || c >= snap.vertices.size())
                continue;
            for (const auto& v : snap.vertices[c]) {
                o << "<text class=\"label\" x=\"" << X(v.point[0]) << "\" y=\"" << Y(v.point[1])
                  << "\" font-size=\"12\" fill=\"darkred\">" << v.label << "</text>\n";
            }
        }
        o << "</g>\n";
    }

    if (!trace.empty()) {
        o << "<polyline class=\"trajectory\" fill=\"none\" stroke=\"green\" points=\"";
        for (std::size_t i = 0; i < trace.size(); ++i)
            o << (i ? " " : "") << X(trace[i].best_point[0]) << ',' << Y(trace[i].best_point[1]);
        o << "\"/>\n";
    }
    o << "</svg>\n";
    f.close();
    f.commit();
    return true;
}

} // namespace sgm::bench

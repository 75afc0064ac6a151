#include "testmend/eval/report.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "testmend/core/errors.hpp"
#include "testmend/core/serialize.hpp"
#include "testmend/eval/statistics.hpp"

namespace testmend {

void TargetSummary::validate() const {
    if (tests_passing > tests_compiling || tests_compiling > tests_generated)
        throw InvalidState("summary of " + target + " has passing " + std::to_string(tests_passing) + ", compiling " +
                           std::to_string(tests_compiling) + ", generated " + std::to_string(tests_generated));
}

std::size_t RunSummary::generated() const {
    std::size_t n = 0;
    for (const auto& t : targets) n += t.tests_generated;
    return n;
}

std::size_t RunSummary::compiling() const {
    std::size_t n = 0;
    for (const auto& t : targets) n += t.tests_compiling;
    return n;
}

std::size_t RunSummary::passing() const {
    std::size_t n = 0;
    for (const auto& t : targets) n += t.tests_passing;
    return n;
}

std::string RunSummary::display_label() const {
    std::string out = project;
    if (!mode.empty()) out += (out.empty() ? "" : "/") + mode;
    if (!label.empty()) out += (out.empty() ? "" : "/") + label;
    return out;
}

void to_json(nlohmann::json& j, const TargetSummary& v) {
    j = {{"target", v.target},
         {"unit", v.unit},
         {"granularity", to_string(v.granularity)},
         {"tests_generated", v.tests_generated},
         {"tests_compiling", v.tests_compiling},
         {"tests_passing", v.tests_passing},
         {"coverage", v.coverage},
         {"ledger", v.ledger},
         {"error", v.error}};
}

void from_json(const nlohmann::json& j, TargetSummary& v) {
    v.target = j.at("target").get<std::string>();
    v.unit = j.value("unit", std::string{});
    v.granularity = granularity_from_string(j.value("granularity", std::string("class")));
    v.tests_generated = j.at("tests_generated").get<std::size_t>();
    v.tests_compiling = j.at("tests_compiling").get<std::size_t>();
    v.tests_passing = j.at("tests_passing").get<std::size_t>();
    if (j.contains("coverage")) v.coverage = j["coverage"].get<CoverageReport>();
    if (j.contains("ledger")) v.ledger = j["ledger"].get<LedgerSnapshot>();
    v.error = j.value("error", std::string{});
    v.validate();
}

void to_json(nlohmann::json& j, const RunSummary& v) {
    j = {{"project", v.project}, {"mode", v.mode},         {"label", v.label},
         {"targets", v.targets}, {"coverage", v.coverage}, {"ledger", v.ledger}};
}

void from_json(const nlohmann::json& j, RunSummary& v) {
    v.project = j.value("project", std::string{});
    v.mode = j.value("mode", std::string{});
    v.label = j.value("label", std::string{});
    v.targets = j.value("targets", std::vector<TargetSummary>{});
    if (j.contains("coverage")) v.coverage = j["coverage"].get<CoverageReport>();
    if (j.contains("ledger")) v.ledger = j["ledger"].get<LedgerSnapshot>();
}

double line_percent(const CoverageReport& report) {
    if (report.lines_total() == 0) return std::nan("");
    return 100.0 * static_cast<double>(report.lines_covered()) / static_cast<double>(report.lines_total());
}

double branch_percent(const CoverageReport& report) {
    if (report.branches_total() == 0) return std::nan("");
    return 100.0 * static_cast<double>(report.branches_covered()) / static_cast<double>(report.branches_total());
}

void to_json(nlohmann::json& j, const Comparison& v) {
    j = {{"metric", v.metric},
         {"baseline", v.baseline},
         {"candidate", v.candidate},
         {"u", v.u},
         {"p_value", v.p_value},
         {"exact", v.exact},
         {"vda", v.vda},
         {"significant", v.significant},
         {"mean_difference", v.mean_difference}};
    if (!v.note.empty()) j["note"] = v.note;
}

namespace {

double sample_of(const TargetSummary& t, const std::string& metric) {
    if (metric == "compile_rate") {
        auto r = compute_rate(t.tests_compiling, t.tests_generated);
        return r.defined() ? r.exact() : 0.0;
    }
    if (metric == "pass_rate") {
        auto r = compute_rate(t.tests_passing, t.tests_generated);
        return r.defined() ? r.exact() : 0.0;
    }
    if (metric == "line_coverage") {
        double v = line_percent(t.coverage);
        return std::isnan(v) ? 0.0 : v;
    }
    if (metric == "branch_coverage") {
        double v = branch_percent(t.coverage);
        return std::isnan(v) ? 0.0 : v;
    }
    throw InvalidState("unknown metric " + metric);
}

double mean(const std::vector<double>& v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

nlohmann::json rate_json(const Rate& r) {
    nlohmann::json j = {{"numerator", r.numerator}, {"denominator", r.denominator}, {"text", r.str()}};
    j["percent"] = r.defined() ? nlohmann::json(static_cast<double>(*r.hundredths) / 100.0) : nlohmann::json();
    return j;
}

nlohmann::json percent_json(double v) {
    if (std::isnan(v)) return nullptr;
    return static_cast<double>(round_half_up_hundredths(v)) / 100.0;
}

std::string percent_text(const nlohmann::json& v) {
    if (v.is_null()) return "n/a";
    return format_hundredths(round_half_up_hundredths(v.get<double>())) + "%";
}

} // namespace

std::vector<double> per_target_samples(const RunSummary& run, const std::string& metric) {
    std::vector<double> out;
    for (const auto& t : run.targets) out.push_back(sample_of(t, metric));
    return out;
}

std::vector<Comparison> compare_runs(const RunSummary& baseline, const RunSummary& candidate) {
    std::set<std::string> a;
    std::set<std::string> b;
    for (const auto& t : baseline.targets) a.insert(t.target);
    for (const auto& t : candidate.targets) b.insert(t.target);
    if (a != b || a.empty())
        throw MismatchedTargets("runs " + baseline.display_label() + " and " + candidate.display_label() +
                                " cover different targets");
    // Pair the samples by target.
    std::map<std::string, const TargetSummary*> other;
    for (const auto& t : candidate.targets) other[t.target] = &t;
    std::vector<Comparison> out;
    for (const char* metric : {"compile_rate", "pass_rate", "line_coverage", "branch_coverage"}) {
        std::vector<double> xs;
        std::vector<double> ys;
        for (const auto& t : baseline.targets) {
            xs.push_back(sample_of(t, metric));
            ys.push_back(sample_of(*other.at(t.target), metric));
        }
        Comparison c;
        c.metric = metric;
        c.baseline = baseline.display_label();
        c.candidate = candidate.display_label();
        c.mean_difference = mean(ys) - mean(xs);
        c.vda = vargha_delaney_a(ys, xs);
        try {
            MwuResult r = mann_whitney_u(ys, xs);
            c.u = r.u;
            c.p_value = r.p_value;
            c.exact = r.exact;
            c.significant = r.p_value < significance_level;
        } catch (const DegenerateSample&) {
            c.u = mwu_statistic(ys, xs);
            c.p_value = 1.0;
            c.note = "all samples identical";
        }
        out.push_back(std::move(c));
    }
    return out;
}

nlohmann::json build_report(const std::vector<RunSummary>& summaries, const std::vector<Comparison>& comparisons) {
    if (summaries.empty()) throw InvalidState("a report needs at least one run summary");
    nlohmann::json rates_rows = nlohmann::json::array();
    nlohmann::json coverage_rows = nlohmann::json::array();
    nlohmann::json cost_rows = nlohmann::json::array();
    std::vector<Rate> compile_rates;
    std::vector<Rate> pass_rates;
    std::vector<double> lines;
    std::vector<double> branches;
    std::size_t covered_lines = 0, total_lines = 0, covered_branches = 0, total_branches = 0;
    LedgerSnapshot cost_total;

    for (const auto& s : summaries) {
        Rate c = compute_rate(s.compiling(), s.generated());
        Rate p = compute_rate(s.passing(), s.generated());
        compile_rates.push_back(c);
        pass_rates.push_back(p);
        rates_rows.push_back({{"label", s.display_label()},
                              {"generated", s.generated()},
                              {"compiling", s.compiling()},
                              {"passing", s.passing()},
                              {"compile_rate", rate_json(c)},
                              {"pass_rate", rate_json(p)}});
        double lp = line_percent(s.coverage);
        double bp = branch_percent(s.coverage);
        if (!std::isnan(lp)) lines.push_back(lp);
        if (!std::isnan(bp)) branches.push_back(bp);
        covered_lines += s.coverage.lines_covered();
        total_lines += s.coverage.lines_total();
        covered_branches += s.coverage.branches_covered();
        total_branches += s.coverage.branches_total();
        coverage_rows.push_back({{"label", s.display_label()}, {"line", percent_json(lp)}, {"branch", percent_json(bp)}});
        cost_rows.push_back({{"label", s.display_label()},
                             {"requests", s.ledger.requests},
                             {"retries_absorbed", s.ledger.retries_absorbed},
                             {"per_phase", s.ledger.per_phase}});
        cost_total.requests += s.ledger.requests;
        cost_total.retries_absorbed += s.ledger.retries_absorbed;
        for (const auto& [phase, n] : s.ledger.per_phase) cost_total.per_phase[phase] += n;
    }

    auto avg = [](const std::optional<double>& v) { return v ? percent_json(*v) : nlohmann::json(); };
    auto plain_avg = [](const std::vector<double>& v) {
        return v.empty() ? nlohmann::json() : percent_json(mean(v));
    };
    Rate pooled_compile = pooled_rate(compile_rates);
    Rate pooled_pass = pooled_rate(pass_rates);
    nlohmann::json report;
    report["rates"] = {
        {"rows", rates_rows},
        {"total",
         {{"generated", pooled_compile.denominator},
          {"compiling", pooled_compile.numerator},
          {"passing", pooled_pass.numerator},
          {"compile_rate", rate_json(pooled_compile)},
          {"pass_rate", rate_json(pooled_pass)}}},
        {"average", {{"compile_rate", avg(average_rate(compile_rates))}, {"pass_rate", avg(average_rate(pass_rates))}}},
    };
    auto pooled_pct = [](std::size_t covered, std::size_t total) {
        return total == 0 ? nlohmann::json() : percent_json(100.0 * static_cast<double>(covered) / static_cast<double>(total));
    };
    report["coverage"] = {
        {"rows", coverage_rows},
        {"total", {{"line", pooled_pct(covered_lines, total_lines)}, {"branch", pooled_pct(covered_branches, total_branches)}}},
        {"average", {{"line", plain_avg(lines)}, {"branch", plain_avg(branches)}}},
    };
    report["statistics"] = comparisons;
    report["cost"] = {{"rows", cost_rows},
                      {"total",
                       {{"requests", cost_total.requests},
                        {"retries_absorbed", cost_total.retries_absorbed},
                        {"per_phase", cost_total.per_phase}}}};
    report["notes"] = {
        "Total rows pool counts across rows; Average rows are unweighted means of the unrounded row values.",
        "Coverage is pooled over all targets of a row before averaging across rows.",
        "Requests count each logical prompt once; transport retries are listed separately.",
    };
    return report;
}

namespace {

std::string pad(const std::string& s, std::size_t width, bool right = false) {
    if (s.size() >= width) return s;
    return right ? std::string(width - s.size(), ' ') + s : s + std::string(width - s.size(), ' ');
}

std::string table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> width(header.size());
    for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
    for (const auto& r : rows) {
        for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
    }
    auto line = [&](const std::vector<std::string>& r) {
        std::string out;
        for (std::size_t c = 0; c < r.size(); ++c) {
            if (c) out += "  ";
            out += pad(r[c], width[c], c > 0);
        }
        while (!out.empty() && out.back() == ' ') out.pop_back();
        return out + "\n";
    };
    std::string out = line(header);
    std::size_t total = 0;
    for (auto w : width) total += w;
    out += std::string(total + 2 * (width.size() - 1), '-') + "\n";
    for (const auto& r : rows) out += line(r);
    return out;
}

std::string rate_cell(const nlohmann::json& rate) {
    return rate.at("text").get<std::string>() + " (" + std::to_string(rate.at("numerator").get<std::size_t>()) + "/" +
           std::to_string(rate.at("denominator").get<std::size_t>()) + ")";
}

} // namespace

std::string render_report_table(const nlohmann::json& report) {
    std::string out = "Rates\n";
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : report["rates"]["rows"])
        rows.push_back({r["label"].get<std::string>(), rate_cell(r["compile_rate"]), rate_cell(r["pass_rate"])});
    const auto& total = report["rates"]["total"];
    rows.push_back({"Total", rate_cell(total["compile_rate"]), rate_cell(total["pass_rate"])});
    const auto& average = report["rates"]["average"];
    rows.push_back({"Average", percent_text(average["compile_rate"]), percent_text(average["pass_rate"])});
    out += table({"run", "compile rate", "pass rate"}, rows);

    out += "\nCoverage\n";
    rows.clear();
    for (const auto& r : report["coverage"]["rows"])
        rows.push_back({r["label"].get<std::string>(), percent_text(r["line"]), percent_text(r["branch"])});
    rows.push_back({"Total", percent_text(report["coverage"]["total"]["line"]),
                    percent_text(report["coverage"]["total"]["branch"])});
    rows.push_back({"Average", percent_text(report["coverage"]["average"]["line"]),
                    percent_text(report["coverage"]["average"]["branch"])});
    out += table({"run", "line", "branch"}, rows);

    if (!report["statistics"].empty()) {
        out += "\nStatistics (Mann-Whitney U, Vargha-Delaney A)\n";
        rows.clear();
        for (const auto& c : report["statistics"]) {
            std::ostringstream p;
            p << std::setprecision(4) << c["p_value"].get<double>();
            std::ostringstream a;
            a << std::fixed << std::setprecision(3) << c["vda"].get<double>();
            std::ostringstream d;
            d << std::showpos << std::fixed << std::setprecision(2) << c["mean_difference"].get<double>();
            rows.push_back({c["metric"].get<std::string>(), c["baseline"].get<std::string>() + " vs " +
                                                                c["candidate"].get<std::string>(),
                            p.str(), a.str(), d.str(), c["significant"].get<bool>() ? "yes" : "no"});
        }
        out += table({"metric", "runs", "p", "A", "delta", "p<0.05"}, rows);
    }

    out += "\nCost (requests)\n";
    rows.clear();
    auto phases = [](const nlohmann::json& per_phase) {
        std::string s;
        for (const auto& [phase, n] : per_phase.items()) {
            s += (s.empty() ? "" : ", ") + phase + "=" + std::to_string(n.get<std::size_t>());
        }
        return s;
    };
    for (const auto& r : report["cost"]["rows"])
        rows.push_back({r["label"].get<std::string>(), std::to_string(r["requests"].get<std::size_t>()),
                        std::to_string(r["retries_absorbed"].get<std::size_t>()), phases(r["per_phase"])});
    const auto& ct = report["cost"]["total"];
    rows.push_back({"Total", std::to_string(ct["requests"].get<std::size_t>()),
                    std::to_string(ct["retries_absorbed"].get<std::size_t>()), phases(ct["per_phase"])});
    out += table({"run", "requests", "retries", "per phase"}, rows);

    out += "\nNotes\n";
    for (const auto& n : report["notes"]) out += "- " + n.get<std::string>() + "\n";
    return out;
}

void emit_report(const std::vector<RunSummary>& summaries, ReportFormat format, const std::string& path,
                 const std::vector<Comparison>& comparisons) {
    auto report = build_report(summaries, comparisons);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IOFailure("cannot write report " + path);
    if (format == ReportFormat::structured) out << report.dump(2) << "\n";
    else out << render_report_table(report);
    if (!out) throw IOFailure("cannot write report " + path);
}

} // namespace testmend

#include "newsframe/report.hpp"

#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include <nlohmann/json.hpp>

#include "newsframe/csv.hpp"
#include "newsframe/errors.hpp"
#include "newsframe/frames.hpp"
#include "newsframe/svg.hpp"

namespace newsframe {

namespace fs = std::filesystem;

ReportFormat report_format_from_string(const std::string& s) {
    if (s == "json") return ReportFormat::Json;
    if (s == "table") return ReportFormat::Table;
    if (s == "figure") return ReportFormat::Figure;
    throw UsageError("unknown report format '" + s + "' (expected json, table or figure)");
}

namespace {

struct Row {
    std::string label;
    std::optional<const EvalReport*> all, relevant;
};

std::vector<Row> table_rows(const std::vector<EvalReport>& reports) {
    bool mixed = false;
    for (const auto& r : reports) mixed |= r.spec.task != reports.front().spec.task;
    std::vector<Row> rows;
    std::map<std::string, std::size_t> index;
    for (const auto& r : reports) {
        auto label = r.spec.modality.key();
        if (mixed) label = to_string(r.spec.task) + ": " + label;
        auto [it, fresh] = index.emplace(label, rows.size());
        if (fresh) rows.push_back({label, std::nullopt, std::nullopt});
        auto& row = rows[it->second];
        auto& cell = r.spec.subset == Subset::All ? row.all : row.relevant;
        if (cell) throw UsageError("two reports for " + label + " on the " + to_string(r.spec.subset) + " subset");
        cell = &r;
    }
    return rows;
}

std::string pct(const EvalReport& r) { return svg::num(100.0 * r.mean_accuracy, 1); }

}  // namespace

std::string render_table_text(const std::vector<EvalReport>& reports) {
    const auto rows = table_rows(reports);
    std::size_t width = 8;
    for (const auto& r : rows) width = std::max(width, r.label.size());
    auto pad = [](std::string s, std::size_t n) {
        s.resize(std::max(n, s.size()), ' ');
        return s;
    };
    auto cell = [](const std::optional<const EvalReport*>& r) {
        if (!r) return std::string("-");
        return pct(**r) + " +/- " + svg::num(100.0 * (*r)->std_accuracy, 1);
    };
    std::ostringstream out;
    out << pad("Modality", width) << "  " << pad("All", 16) << "  Relevant\n";
    out << std::string(width + 2 + 16 + 2 + 16, '-') << '\n';
    for (const auto& r : rows) out << pad(r.label, width) << "  " << pad(cell(r.all), 16) << "  " << cell(r.relevant) << '\n';
    out << "\nMean micro accuracy (%) +/- sample std over folds and seeds.\n";
    return out.str();
}

std::string render_table_csv(const std::vector<EvalReport>& reports) {
    std::ostringstream out;
    csv::write_row(out, {"modality", "all_mean", "all_std", "relevant_mean", "relevant_std"});
    for (const auto& r : table_rows(reports)) {
        std::vector<std::string> fields{r.label};
        for (const auto& c : {r.all, r.relevant}) {
            fields.push_back(c ? pct(**c) : "");
            fields.push_back(c ? svg::num(100.0 * (*c)->std_accuracy, 1) : "");
        }
        csv::write_row(out, fields);
    }
    return out.str();
}

std::string render_f1_figure(const std::vector<EvalReport>& reports, Subset subset) {
    std::vector<const EvalReport*> series;
    for (const auto& r : reports) {
        if (r.spec.task == Task::Frame && r.spec.subset == subset) series.push_back(&r);
    }
    if (series.empty()) return {};

    const double left = 60, top = 40, plot_h = 300, group_w = 24.0 + 14.0 * static_cast<double>(series.size());
    const double plot_w = group_w * kNumFrames;
    const double legend_h = 18.0 * static_cast<double>(series.size());
    const double width = left + plot_w + 20, height = top + plot_h + 120 + legend_h;
    const double bar_w = (group_w - 24.0) / static_cast<double>(series.size());

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << svg::num(width, 0) << "\" height=\""
      << svg::num(height, 0) << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s << "<text x=\"" << svg::num(left, 0) << "\" y=\"20\" font-size=\"14\">Per frame F1 ("
      << (subset == Subset::All ? "all articles" : "articles with relevant images") << ")</text>\n";
    for (int t = 0; t <= 10; t += 2) {
        const double y = top + plot_h - plot_h * t / 10.0;
        s << "<line x1=\"" << svg::num(left, 0) << "\" x2=\"" << svg::num(left + plot_w, 0) << "\" y1=\""
          << svg::num(y) << "\" y2=\"" << svg::num(y) << "\" stroke=\"#ddd\"/>\n";
        s << "<text x=\"" << svg::num(left - 6, 0) << "\" y=\"" << svg::num(y + 4) << "\" text-anchor=\"end\">"
          << svg::num(t / 10.0, 1) << "</text>\n";
    }
    for (int f = 0; f < kNumFrames; ++f) {
        const double gx = left + group_w * f + 12.0;
        for (std::size_t i = 0; i < series.size(); ++i) {
            const double v = series[i]->per_class[static_cast<std::size_t>(f)].f1;
            const double h = plot_h * v;
            s << "<rect x=\"" << svg::num(gx + bar_w * static_cast<double>(i)) << "\" y=\""
              << svg::num(top + plot_h - h) << "\" width=\"" << svg::num(bar_w) << "\" height=\"" << svg::num(h)
              << "\" fill=\"" << svg::colour(i) << "\"><title>" << svg::escape(series[i]->spec.modality.key())
              << ": " << svg::num(v, 3) << "</title></rect>\n";
        }
        const double cx = left + group_w * f + group_w / 2;
        s << "<text transform=\"translate(" << svg::num(cx) << "," << svg::num(top + plot_h + 10)
          << ") rotate(40)\">" << svg::escape(kFrames[static_cast<std::size_t>(f)].name) << "</text>\n";
    }
    s << "<line x1=\"" << svg::num(left, 0) << "\" x2=\"" << svg::num(left + plot_w, 0) << "\" y1=\""
      << svg::num(top + plot_h) << "\" y2=\"" << svg::num(top + plot_h) << "\" stroke=\"black\"/>\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        const double y = top + plot_h + 110 + 18.0 * static_cast<double>(i);
        s << "<rect x=\"" << svg::num(left, 0) << "\" y=\"" << svg::num(y - 10) << "\" width=\"12\" height=\"12\" fill=\""
          << svg::colour(i) << "\"/><text x=\"" << svg::num(left + 18, 0) << "\" y=\"" << svg::num(y) << "\">"
          << svg::escape(series[i]->spec.modality.key()) << "</text>\n";
    }
    s << "</svg>\n";
    return s.str();
}

std::vector<fs::path> emit_report(const std::vector<EvalReport>& reports, ReportFormat format, const fs::path& out_dir) {
    fs::create_directories(out_dir);
    std::vector<fs::path> written;
    auto write = [&](const std::string& name, const std::string& body) {
        const auto path = out_dir / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw DataError("cannot write " + path.string());
        out << body;
        written.push_back(path);
    };
    switch (format) {
        case ReportFormat::Json: {
            nlohmann::json j = nlohmann::json::array();
            for (const auto& r : reports) j.push_back(r);
            write("reports.json", j.dump(2) + "\n");
            break;
        }
        case ReportFormat::Table:
            write("table.txt", render_table_text(reports));
            write("table.csv", render_table_csv(reports));
            break;
        case ReportFormat::Figure:
            for (auto subset : {Subset::All, Subset::RelevantOnly}) {
                const auto body = render_f1_figure(reports, subset);
                if (!body.empty()) write("f1_" + to_string(subset) + ".svg", body);
            }
            break;
    }
    return written;
}

}  // namespace newsframe

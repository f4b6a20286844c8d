#include "psychoak/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "psychoak/align.hpp"
#include "psychoak/annoyance.hpp"
#include "psychoak/errors.hpp"
#include "psychoak/manifest.hpp"
#include "psychoak/segments.hpp"
#include "psychoak/sqm.hpp"
#include "psychoak/wav.hpp"

namespace psychoak {

using nlohmann::json;

std::uint64_t fnv1a_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw MissingPrerequisite("cannot hash missing file: " + path.string());
    std::uint64_t h = 1469598103934665603ULL;
    char buf[1 << 14];
    while (is.read(buf, sizeof(buf)) || is.gcount() > 0) {
        const auto n = static_cast<std::size_t>(is.gcount());
        for (std::size_t i = 0; i < n; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ULL;
        }
        if (!is) break;
    }
    return h;
}

std::string provenance_line(std::uint64_t seed,
                            const std::vector<std::filesystem::path>& inputs) {
    std::ostringstream os;
    os << "tool=" << kToolVersion << " seed=" << seed << " inputs=";
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        if (i) os << ',';
        os << inputs[i].filename().string() << ':' << std::hex << fnv1a_file(inputs[i])
           << std::dec;
    }
    return os.str();
}

namespace {

std::string slug(const std::string& name) {
    std::string s;
    for (char c : name) {
        if (std::isalnum(static_cast<unsigned char>(c)))
            s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        else if (!s.empty() && s.back() != '_')
            s += '_';
    }
    while (!s.empty() && s.back() == '_') s.pop_back();
    return s;
}

json summary_to_json(const Summary& s) {
    return {{"mean", s.mean}, {"max", s.max}, {"p05_exceeded", s.p05_exceeded}};
}

void write_json(const json& j, const std::filesystem::path& path) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path);
    if (!os) throw WriteError("cannot write " + path.string());
    os << j.dump(2) << '\n';
}

json read_json(const std::filesystem::path& path, const char* stage_hint) {
    std::ifstream is(path);
    if (!is)
        throw MissingPrerequisite(path.string() + " not found; run `psychoak " +
                                  stage_hint + "` first");
    json j;
    try {
        is >> j;
    } catch (const json::exception& e) {
        throw DecodeError("cannot parse " + path.string() + ": " + e.what());
    }
    return j;
}

}  // namespace

void cmd_ingest(const Workspace& ws, const std::vector<std::filesystem::path>& manifests,
                std::uint64_t seed) {
    if (manifests.empty()) throw ManifestError("ingest: no manifest given");
    json index;
    index["provenance"] = provenance_line(seed, manifests);
    index["drones"] = json::array();

    for (const auto& mpath : manifests) {
        const auto manifest = load_manifest(mpath);
        const std::string drone_slug = slug(manifest.drone.name);

        json jd;
        jd["drone"] = {{"name", manifest.drone.name},
                       {"l_arm_mm", manifest.drone.l_arm_mm},
                       {"l_rot_mm", manifest.drone.l_rot_mm},
                       {"n_rot", manifest.drone.n_rot},
                       {"weight_kg", manifest.drone.weight_kg},
                       {"blade_count_per_rotor", manifest.drone.blade_count_per_rotor}};
        jd["geometry"] = {{"Dr", manifest.geometry.dr},
                          {"d", manifest.geometry.d},
                          {"Hr", manifest.geometry.hr},
                          {"hs", manifest.geometry.hs},
                          {"hi", manifest.geometry.hi}};
        jd["session"] = {{"wind_dir", manifest.session.wind_dir},
                         {"wi_avg_ms", manifest.session.wi_avg_ms},
                         {"wi_max_ms", manifest.session.wi_max_ms},
                         {"temperature_c", manifest.session.temperature_c},
                         {"humidity", manifest.session.humidity},
                         {"pressure_hpa", manifest.session.pressure_hpa},
                         {"date", manifest.session.date}};
        jd["slug"] = drone_slug;
        jd["segments"] = json::array();
        jd["alignment"] = json::array();

        for (const auto& entry : manifest.recordings) {
            const auto wav_path = manifest.resolve(entry.path);
            if (!std::filesystem::exists(wav_path))
                throw ManifestError("recording file not found: " + wav_path.string());
            RawRecording rec = decode_wav(wav_path);
            rec.mic_id = entry.mic_id;
            if (entry.channel) rec = extract_channel(rec, static_cast<std::size_t>(*entry.channel));
            const CalibratedSignal sig = standardize(rec, entry.calibration_gain);

            if (entry.flight_log) {
                const auto log = load_flight_log(manifest.resolve(*entry.flight_log));
                const auto aligned = correct_position(log);
                const auto res =
                    align_log(sig, aligned, manifest.drone.blade_count_per_rotor);
                jd["alignment"].push_back({{"mic_id", entry.mic_id},
                                           {"offset_s", res.offset_s},
                                           {"peak_correlation", res.peak_correlation},
                                           {"ambiguous", res.ambiguous}});
            }

            const auto cues = load_cues(manifest.resolve(entry.cue_file));
            const auto slices = segment(sig, cues);
            for (const auto& [label, slice] : slices) {
                const auto out = ws.segments_dir() / drone_slug /
                                 ("m" + std::to_string(entry.mic_id)) / (label + ".wav");
                std::filesystem::create_directories(out.parent_path());
                write_wav_float32(out, {slice.samples}, slice.sample_rate);
                jd["segments"].push_back(
                    {{"mic_id", entry.mic_id},
                     {"maneuver", label},
                     {"path", std::filesystem::relative(out, ws.root).string()},
                     {"duration_s", slice.duration_s()},
                     {"calibration_gain", entry.calibration_gain}});
            }
        }
        index["drones"].push_back(jd);
    }
    write_json(index, ws.segments_dir() / "index.json");
}

void cmd_sqm(const Workspace& ws, std::uint64_t seed) {
    const auto index_path = ws.segments_dir() / "index.json";
    const json index = read_json(index_path, "ingest");

    json out_index;
    out_index["provenance"] = provenance_line(seed, {index_path});
    out_index["entries"] = json::array();

    for (const auto& jd : index.at("drones")) {
        const std::string drone_slug = jd.at("slug").get<std::string>();
        for (const auto& js : jd.at("segments")) {
            const auto wav_path = ws.root / js.at("path").get<std::string>();
            const int mic = js.at("mic_id").get<int>();
            const std::string maneuver = js.at("maneuver").get<std::string>();

            RawRecording rec;
            try {
                rec = decode_wav(wav_path);
            } catch (const Error& e) {
                throw SignalTooShort("unreadable segment " + wav_path.string() + ": " +
                                     e.what());
            }
            CalibratedSignal sig;
            sig.samples = rec.channels.at(0);
            sig.sample_rate = rec.sample_rate;
            sig.mic_id = mic;

            const SqmResult r = compute_sqm(sig);

            json j;
            j["provenance"] = provenance_line(seed, {wav_path});
            j["drone"] = jd.at("drone").at("name");
            j["mic_id"] = mic;
            j["maneuver"] = maneuver;
            j["loudness"] = {{"series", r.loudness_t},
                             {"rate_hz", r.loudness_rate_hz},
                             {"summary", summary_to_json(r.loudness_summary)}};
            j["sharpness"] = {{"series", r.sharpness_t},
                              {"rate_hz", r.sharpness_rate_hz},
                              {"summary", summary_to_json(r.sharpness_summary)}};
            j["roughness"] = {{"series", r.roughness_t},
                              {"rate_hz", r.roughness_rate_hz},
                              {"summary", summary_to_json(r.roughness_summary)}};
            j["fluctuation"] = {{"value", r.fluctuation},
                                {"summary", summary_to_json(r.fluctuation_summary)}};

            const std::string name =
                drone_slug + "__m" + std::to_string(mic) + "__" + maneuver + ".json";
            write_json(j, ws.sqm_dir() / name);
            out_index["entries"].push_back({{"file", name},
                                            {"drone", jd.at("drone").at("name")},
                                            {"mic_id", mic},
                                            {"maneuver", maneuver}});
        }
    }
    write_json(out_index, ws.sqm_dir() / "index.json");
}

void cmd_pa(const Workspace& ws, std::uint64_t seed) {
    const auto index_path = ws.sqm_dir() / "index.json";
    const json index = read_json(index_path, "sqm");

    json out_index;
    out_index["provenance"] = provenance_line(seed, {index_path});
    out_index["entries"] = json::array();

    for (const auto& je : index.at("entries")) {
        const auto sqm_path = ws.sqm_dir() / je.at("file").get<std::string>();
        const json js = read_json(sqm_path, "sqm");

        PaInput in;
        const auto series = js.at("loudness").at("series").get<std::vector<double>>();
        in.n5 = n5(series);
        in.s = js.at("sharpness").at("summary").at("mean").get<double>();
        in.r = js.at("roughness").at("summary").at("mean").get<double>();
        in.f = js.at("fluctuation").at("value").get<double>();
        const PaResult res = pa(in);

        json j;
        j["provenance"] = provenance_line(seed, {sqm_path});
        j["drone"] = js.at("drone");
        j["mic_id"] = js.at("mic_id");
        j["maneuver"] = js.at("maneuver");
        j["pa"] = res.pa;
        j["wS"] = res.w_s;
        j["wFR"] = res.w_fr;
        j["inputs"] = {{"N5", in.n5}, {"S", in.s}, {"R", in.r}, {"F", in.f}};

        write_json(j, ws.pa_dir() / je.at("file").get<std::string>());
        out_index["entries"].push_back(je);
    }
    write_json(out_index, ws.pa_dir() / "index.json");
}

void cmd_dataset(const Workspace& ws, std::uint64_t seed) {
    const auto seg_index_path = ws.segments_dir() / "index.json";
    const auto pa_index_path = ws.pa_dir() / "index.json";
    const json seg_index = read_json(seg_index_path, "ingest");
    const json pa_index = read_json(pa_index_path, "pa");

    // collect PA and SQM summaries per (drone, mic, maneuver)
    std::map<std::string, json> pa_files;
    for (const auto& je : pa_index.at("entries")) {
        const auto file = je.at("file").get<std::string>();
        pa_files[file] = read_json(ws.pa_dir() / file, "pa");
    }

    std::vector<SessionData> sessions;
    json table_rows = json::array();
    for (const auto& jd : seg_index.at("drones")) {
        SessionData s;
        s.spec.name = jd.at("drone").at("name").get<std::string>();
        s.spec.l_arm_mm = jd.at("drone").at("l_arm_mm").get<double>();
        s.spec.l_rot_mm = jd.at("drone").at("l_rot_mm").get<double>();
        s.spec.n_rot = jd.at("drone").at("n_rot").get<int>();
        s.spec.weight_kg = jd.at("drone").at("weight_kg").get<double>();
        s.spec.blade_count_per_rotor = jd.at("drone").value("blade_count_per_rotor", 2);
        s.geometry = geometry_from_scalars(
            jd.at("geometry").at("Dr").get<double>(), jd.at("geometry").at("d").get<double>(),
            jd.at("geometry").at("Hr").get<double>(), jd.at("geometry").at("hs").get<double>(),
            jd.at("geometry").at("hi").get<double>());

        const std::string drone_slug = jd.at("slug").get<std::string>();
        std::map<int, bool> mics;
        std::map<std::string, bool> maneuvers;
        for (const auto& js : jd.at("segments")) {
            const int mic = js.at("mic_id").get<int>();
            const std::string maneuver = js.at("maneuver").get<std::string>();
            mics[mic] = true;
            maneuvers[maneuver] = true;
            const std::string file =
                drone_slug + "__m" + std::to_string(mic) + "__" + maneuver + ".json";
            const auto it = pa_files.find(file);
            if (it == pa_files.end())
                throw IncompleteDataset("missing PA for (" + s.spec.name + ", m" +
                                        std::to_string(mic) + ", " + maneuver + ")");
            s.pa[{mic, maneuver}] = it->second.at("pa").get<double>();

            // joined row for the correlation stage
            const json sqm = read_json(ws.sqm_dir() / file, "sqm");
            table_rows.push_back(
                {{"drone", s.spec.name},
                 {"l_arm_mm", s.spec.l_arm_mm},
                 {"l_rot_mm", s.spec.l_rot_mm},
                 {"n_rot", s.spec.n_rot},
                 {"weight_kg", s.spec.weight_kg},
                 {"disc_loading_pa", disc_loading(s.spec)},
                 {"mic_dist_m", mic_distance(s.geometry, mic)},
                 {"maneuver_code", encode_maneuver(maneuver)},
                 {"loudness", sqm.at("loudness").at("summary").at("mean").get<double>()},
                 {"sharpness", sqm.at("sharpness").at("summary").at("mean").get<double>()},
                 {"roughness", sqm.at("roughness").at("summary").at("mean").get<double>()},
                 {"fluctuation", sqm.at("fluctuation").at("value").get<double>()},
                 {"pa", it->second.at("pa").get<double>()}});
        }
        for (const auto& [mic, _] : mics) s.mic_ids.push_back(mic);
        for (const auto& [m, _] : maneuvers) s.maneuvers.push_back(m);
        sessions.push_back(std::move(s));
    }

    const Dataset ds = build_dataset(sessions);
    const std::string prov = provenance_line(seed, {seg_index_path, pa_index_path});
    std::filesystem::create_directories(ws.dataset_dir());
    write_dataset_csv(ws.dataset_dir() / "dataset.csv", ds, prov);

    json groups;
    groups["provenance"] = prov;
    groups["rows"] = json::array();
    for (std::size_t i = 0; i < ds.rows.size(); ++i)
        groups["rows"].push_back({{"drone", ds.drone[i]},
                                  {"mic_id", ds.mic_id[i]},
                                  {"maneuver", ds.maneuver[i]}});
    write_json(groups, ws.dataset_dir() / "groups.json");

    json table;
    table["provenance"] = prov;
    table["rows"] = table_rows;
    write_json(table, ws.dataset_dir() / "table.json");
}

void cmd_correlate(const Workspace& ws, std::uint64_t seed) {
    const auto table_path = ws.dataset_dir() / "table.json";
    const json table = read_json(table_path, "dataset");

    const std::vector<std::string> columns = {
        "l_arm_mm",   "l_rot_mm",  "n_rot",     "weight_kg",   "disc_loading_pa",
        "mic_dist_m", "loudness",  "sharpness", "roughness",   "fluctuation",
        "pa"};
    std::vector<std::vector<double>> rows;
    for (const auto& jr : table.at("rows")) {
        std::vector<double> row;
        for (const auto& c : columns) row.push_back(jr.at(c).get<double>());
        rows.push_back(std::move(row));
    }
    const auto corr = correlation_matrix(columns, rows);
    write_correlation_csv(ws.dataset_dir() / "correlation.csv", corr,
                          provenance_line(seed, {table_path}));
}

namespace {

Dataset load_workspace_dataset(const Workspace& ws) {
    Dataset ds = read_dataset_csv(ws.dataset_dir() / "dataset.csv");
    // group labels from the staged metadata when available
    const auto groups_path = ws.dataset_dir() / "groups.json";
    if (std::filesystem::exists(groups_path)) {
        const json groups = read_json(groups_path, "dataset");
        const auto& rows = groups.at("rows");
        if (rows.size() == ds.rows.size()) {
            for (std::size_t i = 0; i < ds.rows.size(); ++i) {
                ds.drone[i] = rows[i].at("drone").get<std::string>();
                ds.mic_id[i] = rows[i].at("mic_id").get<int>();
                ds.maneuver[i] = rows[i].at("maneuver").get<std::string>();
            }
        }
    }
    return ds;
}

json eval_to_json(const EvalReport& r) {
    json j;
    j["rmse"] = r.rmse;
    j["per_drone"] = json::array();
    for (const auto& d : r.per_drone)
        j["per_drone"].push_back({{"drone", d.drone},
                                  {"predicted_pa", d.predicted_pa},
                                  {"actual_pa", d.actual_pa},
                                  {"n_rows", d.n_rows}});
    return j;
}

}  // namespace

void cmd_train(const Workspace& ws, const std::string& family, std::uint64_t seed) {
    const auto csv_path = ws.dataset_dir() / "dataset.csv";
    const Dataset ds = load_workspace_dataset(ws);
    const std::string prov = provenance_line(seed, {csv_path});

    const auto grid = default_grid(family);
    const auto ncv = nested_cv(ds.rows, family, grid, 5, 3, seed);

    TrainHistory history;
    const auto model = fit_pipeline(family, ncv.best, ds.rows, seed,
                                    family == "mlp" ? &history : nullptr);
    std::filesystem::create_directories(ws.models_dir());
    model->save_json(ws.models_dir() / (family + ".json"), seed, prov);

    json jn;
    jn["provenance"] = prov;
    jn["family"] = family;
    jn["best"] = ncv.best;
    jn["outer_rmse_mean"] = ncv.outer_rmse_mean;
    jn["outer_rmse_std"] = ncv.outer_rmse_std;
    jn["outer_rmse"] = ncv.outer_rmse;
    write_json(jn, ws.models_dir() / (family + "_ncv.json"));

    std::ofstream hist(ws.models_dir() / (family + "_history.csv"));
    hist << "# " << prov << "\nepoch,train_loss,val_loss\n";
    hist.precision(17);
    for (std::size_t e = 0; e < history.train_loss.size(); ++e) {
        hist << e << ',' << history.train_loss[e] << ',';
        if (e < history.val_loss.size()) hist << history.val_loss[e];
        hist << '\n';
    }
}

void cmd_validate(const Workspace& ws, const std::string& family, std::uint64_t seed) {
    const auto csv_path = ws.dataset_dir() / "dataset.csv";
    const Dataset ds = load_workspace_dataset(ws);

    const auto ncv_path = ws.models_dir() / (family + "_ncv.json");
    HyperParams hp;
    if (std::filesystem::exists(ncv_path)) {
        const json jn = read_json(ncv_path, "train");
        hp = jn.at("best").get<HyperParams>();
    } else if (!default_grid(family).empty()) {
        hp = default_grid(family).front();
    }

    const auto report = rmse_validation(ds, family, hp, seed);
    json j;
    j["provenance"] = provenance_line(seed, {csv_path});
    j["family"] = family;
    j["rmse_validation"] = eval_to_json(report);
    write_json(j, ws.reports_dir() / ("validation_" + family + ".json"));
}

void cmd_report(const Workspace& ws, const std::string& family, std::uint64_t seed) {
    const auto csv_path = ws.dataset_dir() / "dataset.csv";
    const Dataset ds = load_workspace_dataset(ws);
    const std::string prov = provenance_line(seed, {csv_path});

    const auto ncv_path = ws.models_dir() / (family + "_ncv.json");
    HyperParams hp;
    if (std::filesystem::exists(ncv_path))
        hp = read_json(ncv_path, "train").at("best").get<HyperParams>();
    else
        hp = default_grid(family).front();

    const auto full = rmse_full(ds, family, hp, seed);
    const auto validation = rmse_validation(ds, family, hp, seed);

    json j;
    j["provenance"] = prov;
    j["family"] = family;
    j["rmse_full"] = eval_to_json(full);
    j["rmse_validation"] = eval_to_json(validation);
    std::filesystem::create_directories(ws.reports_dir());
    write_json(j, ws.reports_dir() / ("eval_" + family + ".json"));

    // prediction sweep over (weight, aspect ratio), other features at means
    const auto model = fit_pipeline(family, hp, ds.rows, seed);
    double mean_dist = 0.0, mean_code = 0.0, mean_nrot = 0.0;
    double w_lo = 1e300, w_hi = -1e300, ar_lo = 1e300, ar_hi = -1e300;
    for (const auto& r : ds.rows) {
        mean_dist += r.mic_dist_m;
        mean_code += r.maneuver_code;
        mean_nrot += r.n_rot;
        w_lo = std::min(w_lo, r.weight_kg);
        w_hi = std::max(w_hi, r.weight_kg);
        ar_lo = std::min(ar_lo, r.aspect_ratio);
        ar_hi = std::max(ar_hi, r.aspect_ratio);
    }
    const auto n = static_cast<double>(ds.rows.size());
    mean_dist /= n;
    mean_code /= n;
    mean_nrot /= n;

    std::ofstream sweep(ws.reports_dir() / ("prediction_sweep_" + family + ".csv"));
    if (!sweep) throw WriteError("cannot write prediction sweep");
    sweep << "# " << prov << "\nweight_kg,aspect_ratio,predicted_pa\n";
    sweep.precision(17);
    constexpr int kGrid = 25;
    for (int i = 0; i < kGrid; ++i) {
        for (int k = 0; k < kGrid; ++k) {
            FeatureRow r;
            r.weight_kg = w_lo + (w_hi - w_lo) * i / (kGrid - 1);
            r.aspect_ratio = ar_lo + (ar_hi - ar_lo) * k / (kGrid - 1);
            r.n_rot = mean_nrot;
            r.mic_dist_m = mean_dist;
            r.maneuver_code = mean_code;
            sweep << r.weight_kg << ',' << r.aspect_ratio << ','
                  << model->predict_row(r) << '\n';
        }
    }
}

}  // namespace psychoak

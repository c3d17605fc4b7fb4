#include "fixtures.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>

#include <functional>

#include <json.hpp>

#include "bookrag/graph_builder.hpp"
#include "bookrag/ingest.hpp"

namespace fx {

using namespace bookrag;

// ---- TempDir ----------------------------------------------------------------

namespace {
std::filesystem::path unique_temp_path(const std::string& tag) {
    static std::atomic<unsigned> counter{0};
    const auto base = std::filesystem::temp_directory_path();
    return base / ("bookrag_" + tag + "_" + std::to_string(::getpid()) + "_" +
                   std::to_string(counter.fetch_add(1)));
}
}  // namespace

TempDir::TempDir(const std::string& tag) : path_(unique_temp_path(tag)) {
    std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
}

// ---- figure-style tree fixture ------------------------------------------------

DocumentSource fig_tree_source() {
    DocumentSource src;
    src.doc_id = "figdoc";
    src.page_count = 2;
    src.base_dir = ".";
    const auto block = [](std::string id, LayoutType type, std::string content, int page,
                          long long order, std::optional<double> fs) {
        Block b;
        b.id = std::move(id);
        b.type = type;
        b.content = std::move(content);
        b.page = page;
        b.order = order;
        b.font_size = fs;
        return b;
    };
    src.blocks.push_back(block("f1", LayoutType::Title, "Method", 1, 1, 14.0));
    src.blocks.push_back(block("f2", LayoutType::Text, "We describe the approach.", 1, 2, {}));
    src.blocks.push_back(block("f3", LayoutType::Title, "MOE Layer", 1, 3, 20.0));
    src.blocks.push_back(
        block("f4", LayoutType::Table, "stage | share\nrouting | 0.2", 1, 4, {}));
    Block image = block("f5", LayoutType::Image, "", 2, 5, {});
    image.image_path = "fig.png";
    image.extra["caption"] = "routing overview";
    src.blocks.push_back(std::move(image));
    src.blocks.push_back(block("f6", LayoutType::Title, "Experiment", 2, 6, 14.0));
    src.blocks.push_back(block("f7", LayoutType::Text, "Setup and results.", 2, 7, {}));
    return src;
}

void script_fig_tree(MockGateway& mock) {
    nlohmann::json verdicts;
    verdicts["verdicts"] = {
        {{"block_id", "f1"}, {"level", 2}, {"type", "Section"}},
        {{"block_id", "f3"}, {"level", nullptr}, {"type", "Text"}},
        {{"block_id", "f6"}, {"level", 2}, {"type", "Section"}},
    };
    mock.script("section_filter", "f1,f3,f6", verdicts.dump());
}

// ---- handbook fixture ---------------------------------------------------------

namespace {

void write_dummy_png(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    out << "\x89PNG dummy";
}

nlohmann::json entity_json(const std::string& name, const std::string& type,
                           const std::string& description) {
    return {{"name", name}, {"type", type}, {"description", description}};
}

nlohmann::json relation_json(const std::string& source, const std::string& target,
                             const std::string& description, const std::string& kind = "") {
    nlohmann::json j{{"source", source}, {"target", target}, {"description", description}};
    if (!kind.empty()) j["kind"] = kind;
    return j;
}

std::string extraction(std::initializer_list<nlohmann::json> entities,
                       std::initializer_list<nlohmann::json> relations = {}) {
    nlohmann::json out;
    out["entities"] = nlohmann::json::array();
    for (const auto& e : entities) out["entities"].push_back(e);
    out["relations"] = nlohmann::json::array();
    for (const auto& r : relations) out["relations"].push_back(r);
    return out.dump();
}

}  // namespace

DocumentSource handbook_source(const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir / "img");
    for (const char* name : {"a", "b", "c", "d", "e", "f"})
        write_dummy_png(dir / "img" / ("fig_" + std::string(name) + ".png"));

    const auto file = dir / "handbook.jsonl";
    std::ofstream out(file);
    out << R"({"format_version":"1","doc_id":"handbook","page_count":12})" << "\n";
    out << R"({"id":"b1","type":"Title","content":"Getting Started","page":1,"order":1,"font_size":16.0})" << "\n";
    out << R"({"id":"b2","type":"Text","content":"The gradient method is used for optimization of the engine.","page":1,"order":2})" << "\n";
    out << R"({"id":"b3","type":"Title","content":"Core Concepts","page":2,"order":3,"font_size":16.0})" << "\n";
    out << R"({"id":"b4","type":"Text","content":"Scheduling relies on the gradient method for tuning.","page":2,"order":4})" << "\n";
    out << R"({"id":"b5","type":"Table","content":"model | accuracy\nalpha | 0.91\nbeta | 0.88","page":3,"order":5})" << "\n";
    out << R"({"id":"b6","type":"Image","image_path":"img/fig_a.png","content":"Chart of throughput by stage","page":3,"order":6})" << "\n";
    out << R"({"id":"b7","type":"Image","image_path":"img/fig_b.png","content":"Diagram of the pipeline","page":5,"order":7})" << "\n";
    out << R"({"id":"b8","type":"Title","content":"Advanced Usage","page":6,"order":8,"font_size":16.0})" << "\n";
    out << R"({"id":"b9","type":"Image","image_path":"img/fig_c.png","content":"Chart of latency","page":6,"order":9})" << "\n";
    out << R"({"id":"b10","type":"Text","content":"Failover requires dual controllers.","page":7,"order":10})" << "\n";
    out << R"({"id":"b11","type":"Image","image_path":"img/fig_d.png","content":"Plot of memory usage","page":8,"order":11})" << "\n";
    out << R"({"id":"b12","type":"Image","image_path":"img/fig_e.png","content":"Graph of errors","page":9,"order":12})" << "\n";
    out << R"({"id":"b13","type":"Formula","content":"E = m c^2","page":10,"order":13})" << "\n";
    out << R"({"id":"b14","type":"Image","image_path":"img/fig_f.png","content":"Chart outside range","page":11,"order":14})" << "\n";
    out << R"({"id":"b15","type":"Text","content":"Appendix notes.","page":12,"order":15})" << "\n";
    out.close();
    return load_blocks(file);
}

void script_handbook_build(MockGateway& mock) {
    nlohmann::json verdicts;
    verdicts["verdicts"] = {
        {{"block_id", "b1"}, {"level", 1}, {"type", "Section"}},
        {{"block_id", "b3"}, {"level", 1}, {"type", "Section"}},
        {{"block_id", "b8"}, {"level", 1}, {"type", "Section"}},
    };
    mock.script("section_filter", "b1,b3,b8", verdicts.dump());

    mock.script("extract_text", "b2",
                extraction({entity_json("gradient method", "CONCEPT",
                                        "used for optimization in getting started")}));
    mock.script(
        "extract_text", "b4",
        extraction({entity_json("gradient method", "CONCEPT",
                                "used for optimization when scheduling"),
                    entity_json("scheduling", "CONCEPT", "tuning procedure")},
                   {relation_json("scheduling", "gradient method", "relies on")}));
    mock.script(
        "extract_table", "b5",
        extraction({entity_json("results table", "TABLE", "model accuracy comparison"),
                    entity_json("model", "HEADER", "first column"),
                    entity_json("accuracy", "HEADER", "metric column"),
                    entity_json("alpha", "MODEL", "baseline configuration"),
                    entity_json("beta", "MODEL", "tuned configuration")},
                   {relation_json("model", "results table", "column header", "ContainedIn"),
                    relation_json("accuracy", "results table", "column header",
                                  "ContainedIn")}));
    mock.script("extract_vision", "b6",
                extraction({entity_json("figure b6", "IMAGE", "chart of throughput by stage")}));
    mock.script("extract_vision", "b7",
                extraction({entity_json("figure b7", "IMAGE", "diagram of the pipeline")}));
    mock.script("extract_vision", "b9",
                extraction({entity_json("figure b9", "IMAGE", "chart of latency")}));
    mock.script("extract_text", "b10",
                extraction({entity_json("failover", "CONCEPT", "requires dual controllers")}));
    mock.script("extract_vision", "b11",
                extraction({entity_json("figure b11", "IMAGE", "plot of memory usage")}));
    mock.script("extract_vision", "b12",
                extraction({entity_json("figure b12", "IMAGE", "graph of errors")}));
    mock.script(
        "extract_formula", "b13",
        extraction({entity_json("energy relation", "FORMULA", "mass energy equivalence"),
                    entity_json("energy", "QUANTITY", "released amount"),
                    entity_json("mass", "QUANTITY", "body property")}));
    mock.script("extract_vision", "b14",
                extraction({entity_json("figure b14", "IMAGE", "chart outside range")}));
    mock.script("extract_text", "b15",
                extraction({entity_json("appendix", "CONCEPT", "closing notes")}));
}

BuildConfig handbook_build_config() {
    BuildConfig cfg;
    cfg.resolution.top_k = 10;
    cfg.resolution.g = 0.6;
    // token-overlap scores on short strings are noisy; the floor keeps
    // unrelated entities from merging through spurious gradients
    cfg.resolution.tau_min = 0.5;
    return cfg;
}

BookIndex build_handbook_index(const std::filesystem::path& dir, BuildStats* stats) {
    const DocumentSource src = handbook_source(dir);
    MockGateway mock(MockGateway::Mode::Strict);
    script_handbook_build(mock);
    const PromptLibrary prompts;
    return build_index(src, mock, handbook_build_config(), prompts, stats);
}

std::vector<HandbookQuery> handbook_queries() {
    return {
        {"What is the gradient method?", "single-hop"},
        {"How many charts are shown in the first 10 pages of the document?", "global"},
        {"What is the difference in accuracy between alpha and beta?", "multi-hop"},
        {"How many tables are in the document?", "global"},
        {"List all figures in the document.", "global"},
        {"What is failover?", "single-hop"},
        {"Summarize the discussion in the Advanced Usage section.", "global"},
        {"What is the energy relation formula?", "single-hop"},
        {"How many chapters are in this report?", "global"},
        {"What does the scheduling rely on?", "single-hop"},
    };
}

void script_handbook_queries(MockGateway& mock) {
    const auto classify_response = [](const std::string& category) {
        return nlohmann::json{{"category", category}}.dump();
    };
    for (const HandbookQuery& q : handbook_queries())
        mock.script("classify", q.question, classify_response(q.category));

    const auto mentions = [](std::initializer_list<const char*> names) {
        nlohmann::json entities = nlohmann::json::array();
        for (const char* n : names)
            entities.push_back({{"entity_name", n}, {"entity_type", "CONCEPT"}});
        return nlohmann::json{{"entities", entities}}.dump();
    };

    // Q1: single-hop, entity path
    mock.script("query_extract", "What is the gradient method?", mentions({"gradient method"}));
    mock.script("reduce", "What is the gradient method?",
                "The gradient method tunes the engine.");

    // Q2: global COUNT over images in pages 1-10 (no synthesis call needed)
    mock.script("filter_spec", "How many charts are shown in the first 10 pages of the document?",
                nlohmann::json{{"filters",
                                {{{"filter_type", "page"}, {"filter_value", "1-10"}},
                                 {{"filter_type", "image"}}}},
                               {"operation", "COUNT"}}
                    .dump());

    // Q3: multi-hop over the accuracy table
    mock.script(
        "decompose", "What is the difference in accuracy between alpha and beta?",
        nlohmann::json{
            {"sub_questions",
             {{{"question", "What is the accuracy of alpha?"}, {"type", "retrieval"}},
              {{"question", "What is the accuracy of beta?"}, {"type", "retrieval"}},
              {{"question", "Which accuracy is greater and by how much?"},
               {"type", "synthesis"}}}}}
            .dump());
    mock.script("query_extract", "What is the accuracy of alpha?", mentions({"alpha"}));
    mock.script("query_extract", "What is the accuracy of beta?", mentions({"beta"}));
    mock.script("map", "What is the accuracy of alpha?", "alpha reaches accuracy 0.91");
    mock.script("map", "What is the accuracy of beta?", "beta reaches accuracy 0.88");
    mock.script("reduce", "What is the difference in accuracy between alpha and beta?",
                "alpha has accuracy 0.91, beta 0.88; the difference is 0.03.");

    // Q4 / Q5 / Q9: plain global aggregations
    mock.script("filter_spec", "How many tables are in the document?",
                nlohmann::json{{"filters", {{{"filter_type", "table"}}}},
                               {"operation", "COUNT"}}
                    .dump());
    mock.script("filter_spec", "List all figures in the document.",
                nlohmann::json{{"filters", {{{"filter_type", "image"}}}},
                               {"operation", "LIST"}}
                    .dump());
    mock.script("filter_spec", "How many chapters are in this report?",
                nlohmann::json{{"filters", {{{"filter_type", "section"}}}},
                               {"operation", "COUNT"}}
                    .dump());

    // Q6: single-hop through the section fallback (extraction finds nothing)
    mock.script("query_extract", "What is failover?", mentions({}));
    mock.script("select_section", "What is failover?",
                nlohmann::json{{"sections", {"Advanced Usage"}}}.dump());
    mock.script("reduce", "What is failover?", "Failover requires dual controllers.");

    // Q7: global SUMMARIZE over one section
    mock.script("filter_spec", "Summarize the discussion in the Advanced Usage section.",
                nlohmann::json{{"filters",
                                {{{"filter_type", "section"},
                                  {"filter_value", "Advanced Usage"}}}},
                               {"operation", "SUMMARIZE"}}
                    .dump());
    mock.script("map", "Summarize the discussion in the Advanced Usage section.",
                "Partial summary of an advanced node.");
    mock.script("reduce", "Summarize the discussion in the Advanced Usage section.",
                "Advanced usage covers failover, latency and memory charts.");

    // Q8 / Q10: single-hop entity paths
    mock.script("query_extract", "What is the energy relation formula?",
                mentions({"energy relation"}));
    mock.script("reduce", "What is the energy relation formula?",
                "It states mass energy equivalence.");
    mock.script("query_extract", "What does the scheduling rely on?", mentions({"scheduling"}));
    mock.script("reduce", "What does the scheduling rely on?",
                "Scheduling relies on the gradient method.");
}

bool index_equal(const BookIndex& a, const BookIndex& b) {
    if (a.doc_id != b.doc_id) return false;
    if (a.tree.root != b.tree.root || a.tree.nodes.size() != b.tree.nodes.size()) return false;
    for (const auto& [id, na] : a.tree.nodes) {
        if (!b.tree.has(id)) return false;
        const TreeNode& nb = b.tree.at(id);
        if (na.type != nb.type || na.level != nb.level || na.content != nb.content ||
            na.image_path != nb.image_path || na.page != nb.page || na.order != nb.order ||
            na.font_size != nb.font_size || na.parent != nb.parent ||
            na.children != nb.children || na.extra != nb.extra)
            return false;
    }
    if (a.graph.entities.size() != b.graph.entities.size()) return false;
    for (const auto& [id, ea] : a.graph.entities) {
        if (!b.graph.has(id)) return false;
        const Entity& eb = b.graph.at(id);
        if (ea.name != eb.name || ea.entity_type != eb.entity_type ||
            ea.description != eb.description || ea.origins != eb.origins)
            return false;
        if (ea.embedding != eb.embedding) return false;  // bitwise doubles
    }
    if (a.graph.relations.size() != b.graph.relations.size()) return false;
    for (std::size_t i = 0; i < a.graph.relations.size(); ++i) {
        const Relation& ra = a.graph.relations[i];
        const Relation& rb = b.graph.relations[i];
        if (ra.source != rb.source || ra.target != rb.target ||
            ra.description != rb.description || ra.kind != rb.kind)
            return false;
    }
    return a.store.entries() == b.store.entries();
}

// ---- randomized documents -----------------------------------------------------

DocumentSource random_source(std::mt19937& rng, const std::filesystem::path& dir,
                             const std::string& doc_id) {
    std::filesystem::create_directories(dir);
    write_dummy_png(dir / "img.png");

    const char* words[] = {"engine", "routing", "cache", "policy",  "budget",
                           "branch", "signal", "merge", "cluster", "window"};
    std::uniform_int_distribution<int> word_pick(0, 9);
    std::uniform_int_distribution<int> block_count(4, 18);
    std::uniform_int_distribution<int> type_pick(0, 9);
    std::uniform_int_distribution<int> fs_pick(10, 20);

    const auto file = dir / (doc_id + ".jsonl");
    std::ofstream out(file);
    const int n = block_count(rng);
    out << nlohmann::json{{"format_version", "1"}, {"doc_id", doc_id}, {"page_count", n}}.dump()
        << "\n";
    for (int i = 1; i <= n; ++i) {
        nlohmann::json rec;
        rec["id"] = "r" + std::to_string(i);
        rec["page"] = (i + 1) / 2 + 1;
        rec["order"] = i;
        const int t = type_pick(rng);
        std::string text = std::string(words[word_pick(rng)]) + " " + words[word_pick(rng)] +
                           " " + words[word_pick(rng)];
        if (t < 2) {
            rec["type"] = "Title";
            rec["content"] = text;
            rec["font_size"] = static_cast<double>(fs_pick(rng));
        } else if (t < 8) {
            rec["type"] = "Text";
            rec["content"] = text + " " + words[word_pick(rng)];
        } else if (t < 9) {
            rec["type"] = "Table";
            rec["content"] = text + " | value";
        } else {
            rec["type"] = "Image";
            rec["image_path"] = "img.png";
            rec["content"] = "chart of " + text;
        }
        out << rec.dump() << "\n";
    }
    out.close();
    return load_blocks(file);
}

// ---- alias corpora ---------------------------------------------------------------

AliasCorpus random_alias_corpus(std::mt19937& rng) {
    std::uniform_int_distribution<int> group_count(2, 12);
    std::uniform_int_distribution<int> group_size(1, 6);

    const int groups = group_count(rng);
    AliasCorpus corpus;
    std::vector<AliasCorpus::Item> tail;
    std::size_t total = 0;
    for (int g = 0; g < groups && total < 50; ++g) {
        int size = group_size(rng);
        for (int m = 0; m < size && total < 50; ++m, ++total) {
            AliasCorpus::Item item{"g" + std::to_string(g) + "_m" + std::to_string(m), g};
            // the guard: first member of groups 0 and 1 lead the stream
            if ((g == 0 || g == 1) && m == 0) {
                corpus.items.push_back(std::move(item));
            } else {
                tail.push_back(std::move(item));
            }
        }
    }
    std::shuffle(tail.begin(), tail.end(), rng);
    corpus.items.insert(corpus.items.end(), tail.begin(), tail.end());
    return corpus;
}

namespace {
int group_of_text(const std::string& text) {
    // names look like g<k>_m<j>; the embedding input starts with the name
    if (text.size() < 2 || text[0] != 'g') return -1;
    int value = 0;
    std::size_t i = 1;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
        value = value * 10 + (text[i] - '0');
        ++i;
    }
    return i > 1 ? value : -1;
}
}  // namespace

GroupMock::GroupMock(std::size_t dim) : MockGateway(Mode::Strict, dim) {}

std::vector<double> GroupMock::embed(const std::string& text) {
    const int group = group_of_text(text);
    if (group < 0) return MockGateway::embed(text);
    std::vector<double> v(embedding_dim(), 0.0);
    v[static_cast<std::size_t>(group) % embedding_dim()] = 1.0;
    return v;
}

std::vector<double> GroupMock::rerank(const std::string& query,
                                      const std::vector<std::string>& candidates) {
    const int q_group = group_of_text(query);
    std::vector<double> scores;
    scores.reserve(candidates.size());
    for (const auto& c : candidates)
        scores.push_back(group_of_text(c) == q_group ? 1.0 : 0.1);
    return scores;
}

std::vector<std::set<std::size_t>> resolve_partition(const AliasCorpus& corpus,
                                                     const ResolutionConfig& cfg) {
    GroupMock mock;
    VectorStore store(mock.embedding_dim());
    KnowledgeGraph graph;
    const PromptLibrary prompts;

    std::map<std::string, std::set<std::size_t>> blocks;  // canonical id -> items
    std::map<std::string, std::string> redirect;          // absorbed -> canonical

    for (std::size_t i = 0; i < corpus.items.size(); ++i) {
        Entity e;
        e.id = "i" + std::to_string(i);
        e.name = corpus.items[i].name;
        e.entity_type = "T";
        e.description = corpus.items[i].name;
        e.origins = {"n" + std::to_string(i)};
        embed_entity(e, mock);
        const ResolutionOutcome outcome = resolve(std::move(e), store, graph, mock, cfg, prompts);
        std::string canonical = outcome.canonical;
        while (redirect.count(canonical)) canonical = redirect[canonical];
        if (outcome.decision == ResolutionDecision::Merged)
            redirect["i" + std::to_string(i)] = canonical;
        blocks[canonical].insert(i);
    }
    std::vector<std::set<std::size_t>> out;
    for (auto& [id, members] : blocks) out.push_back(std::move(members));
    return out;
}

std::vector<std::set<std::size_t>> closure_partition(const AliasCorpus& corpus) {
    // union-find over all alias pairs
    std::vector<std::size_t> parent(corpus.items.size());
    for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
    const std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t i = 0; i < corpus.items.size(); ++i)
        for (std::size_t j = i + 1; j < corpus.items.size(); ++j)
            if (corpus.items[i].group == corpus.items[j].group)
                parent[find(i)] = find(j);

    std::map<std::size_t, std::set<std::size_t>> blocks;
    for (std::size_t i = 0; i < corpus.items.size(); ++i) blocks[find(i)].insert(i);
    std::vector<std::set<std::size_t>> out;
    for (auto& [root, members] : blocks) out.push_back(std::move(members));
    return out;
}

bool same_partition(std::vector<std::set<std::size_t>> a,
                    std::vector<std::set<std::size_t>> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return a == b;
}

// ---- oracles --------------------------------------------------------------------

std::vector<SkylinePoint> skyline_oracle(const std::vector<SkylinePoint>& points) {
    std::vector<SkylinePoint> out;
    for (const SkylinePoint& p : points) {
        bool dominated = false;
        for (const SkylinePoint& q : points) {
            if (q.s_graph >= p.s_graph && q.s_text >= p.s_text &&
                (q.s_graph > p.s_graph || q.s_text > p.s_text)) {
                dominated = true;
                break;
            }
        }
        if (!dominated) out.push_back(p);
    }
    std::sort(out.begin(), out.end(), [](const SkylinePoint& a, const SkylinePoint& b) {
        if (a.s_text != b.s_text) return a.s_text > b.s_text;
        if (a.s_graph != b.s_graph) return a.s_graph > b.s_graph;
        return a.id < b.id;
    });
    return out;
}

std::vector<double> pagerank_oracle(std::size_t n,
                                    const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                                    std::vector<double> personalization, double damping,
                                    int iterations) {
    if (n == 0) return {};
    if (personalization.empty()) personalization.assign(n, 1.0);
    double p_sum = 0.0;
    for (double w : personalization) p_sum += w;
    if (p_sum == 0.0) {
        personalization.assign(n, 1.0 / static_cast<double>(n));
    } else {
        for (double& w : personalization) w /= p_sum;
    }

    // dense symmetric weight matrix
    std::vector<std::vector<double>> w(n, std::vector<double>(n, 0.0));
    for (const auto& [u, v] : edges) {
        w[u][v] += 1.0;
        if (u != v) w[v][u] += 1.0;
    }
    std::vector<double> degree(n, 0.0);
    for (std::size_t u = 0; u < n; ++u)
        for (std::size_t v = 0; v < n; ++v) degree[u] += w[u][v];

    std::vector<double> x = personalization;
    for (int it = 0; it < iterations; ++it) {
        std::vector<double> y(n, 0.0);
        double dangling = 0.0;
        for (std::size_t u = 0; u < n; ++u)
            if (degree[u] == 0.0) dangling += x[u];
        for (std::size_t v = 0; v < n; ++v) {
            double inflow = 0.0;
            for (std::size_t u = 0; u < n; ++u) {
                if (degree[u] > 0.0 && w[u][v] > 0.0) inflow += x[u] * w[u][v] / degree[u];
            }
            y[v] = (1.0 - damping) * personalization[v] +
                   damping * (inflow + dangling * personalization[v]);
        }
        double total = 0.0;
        for (double val : y) total += val;
        for (double& val : y) val /= total;
        x.swap(y);
    }
    return x;
}

}  // namespace fx

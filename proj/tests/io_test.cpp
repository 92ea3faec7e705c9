#include "support.hpp"

#include "ontomerge/ingest.hpp"
#include "ontomerge/xml.hpp"

#include <gtest/gtest.h>

#include <fstream>

using namespace ontomerge;
using namespace testing_support;

namespace {

Ontology sample()
{
    Ontology o("Sample");
    o.add_class({"person", {}});
    o.add_class({"author", {"person"}});
    o.add_slot(datatype_slot("name", {"person"}, XsdKind::String, {1, 1u}));
    o.add_slot(object_slot("knows", {"person"}, {"person", "author"}, {0, std::nullopt}));
    o.add_instance({"ann", {"author"}, {{"name", {Literal{"Ann <\"&> Lee", XsdKind::String}}}, {"knows", {InstanceRef{"bo"}}}}});
    o.add_instance({"bo", {"person"}, {{"name", {Literal{"Bo", XsdKind::String}}}}});
    return o;
}

} // namespace

TEST(Owl, RoundTripPreservesEverything)
{
    auto o = sample();
    auto text = write_owl(o);
    auto back = read_owl(text, "fallback");
    EXPECT_EQ(back.name(), "Sample");
    EXPECT_EQ(write_canonical(back), write_canonical(o));
    EXPECT_EQ(write_owl(back), text);
}

TEST(Owl, FixturesAreAtFixpoint)
{
    for (auto file : {"ruby_bibliography.owl", "niagara_bib.owl", "sigmod_record.owl", "census.owl", "clinic.owl"}) {
        auto text = xml::read_file(fixture(std::string("owl/") + file));
        EXPECT_EQ(write_owl(read_owl(text, "x")), text) << file;
    }
}

TEST(Owl, LiftedFixturesMatchShippedOwl)
{
    struct Case {
        const char* xml;
        const char* name;
        const char* owl;
    };
    for (auto c : {Case{"ruby_bibliography.xml", "Ruby_bibliography", "ruby_bibliography.owl"},
                   Case{"niagara_bib.xml", "Niagara_bib", "niagara_bib.owl"},
                   Case{"sigmod_record.xml", "SigmodRecord", "sigmod_record.owl"}}) {
        ingest::LiftConfig config;
        config.ontology_name = c.name;
        std::vector<std::filesystem::path> files{fixture(std::string("xml/") + c.xml)};
        EXPECT_EQ(write_owl(ingest::lift_files(files, config)), xml::read_file(fixture(std::string("owl/") + c.owl)))
            << c.xml;
    }
}

TEST(Owl, UnsupportedConstructsWarn)
{
    std::string text = R"(<rdf:RDF xmlns:rdf="http://www.w3.org/1999/02/22-rdf-syntax-ns#"
    xmlns:owl="http://www.w3.org/2002/07/owl#" xmlns:rdfs="http://www.w3.org/2000/01/rdf-schema#">
  <owl:Ontology rdf:about="urn:ontomerge:W"/>
  <owl:Class rdf:about="#a"><owl:disjointWith rdf:resource="#b"/></owl:Class>
  <owl:Class rdf:about="#b"/>
  <owl:AnnotationProperty rdf:about="#note"/>
</rdf:RDF>)";
    std::vector<std::string> warnings;
    auto o = read_owl(text, "fallback", &warnings);
    EXPECT_EQ(o.name(), "W");
    EXPECT_EQ(o.classes().size(), 2u);
    EXPECT_GE(warnings.size(), 2u);
}

TEST(Owl, UndeclaredReferenceIsAnError)
{
    std::string text = R"(<rdf:RDF xmlns:rdf="http://www.w3.org/1999/02/22-rdf-syntax-ns#"
    xmlns:owl="http://www.w3.org/2002/07/owl#" xmlns:rdfs="http://www.w3.org/2000/01/rdf-schema#">
  <owl:Ontology rdf:about="urn:ontomerge:W"/>
  <owl:Class rdf:about="#a"><rdfs:subClassOf rdf:resource="#ghost"/></owl:Class>
</rdf:RDF>)";
    try {
        read_owl(text, "fallback");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnresolvableReference);
    }
}

TEST(Owl, MalformedXmlIsReported)
{
    EXPECT_THROW(read_owl("<rdf:RDF", "x"), Error);
}

TEST(Canonical, Layout)
{
    EXPECT_EQ(write_canonical(sample()), R"(ontology Sample
class author super=person
class person super=Thing
objprop knows domain=person range=author,person
dataprop name domain=person range=string
card knows 0..*
card name 1..1
instance ann types=author
instance bo types=person
value ann knows ref bo
value ann name string "Ann <\"&> Lee"
value bo name string "Bo"
)");
}

TEST(TextFile, WriteIsAtomicAndReportsFailure)
{
    auto dir = std::filesystem::temp_directory_path() / "ontomerge_io_test";
    std::filesystem::create_directories(dir);
    auto path = dir / "out.txt";
    write_text_file(path, "hello\n");
    EXPECT_EQ(xml::read_file(path), "hello\n");
    EXPECT_FALSE(std::filesystem::exists(path.string() + ".tmp"));
    try {
        write_text_file(dir / "missing" / "out.txt", "x");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::IoFailure);
    }
    std::filesystem::remove_all(dir);
}

TEST(Script, ParseAndWriteRoundTrip)
{
    auto text = xml::read_file(fixture("scripts/bibliography.merge"));
    auto script = parse_script(text, fixture("scripts"));
    ASSERT_EQ(script.sources.size(), 2u);
    EXPECT_EQ(script.sources[0].name, "Ruby_bibliography");
    EXPECT_EQ(script.engine.merged_name, "GlobalOntology");
    EXPECT_EQ(script.steps.size(), 13u);
    EXPECT_EQ(script.steps[0].line, 6);
    auto again = parse_script(write_script(script), fixture("scripts"));
    ASSERT_EQ(again.steps.size(), script.steps.size());
    for (std::size_t i = 0; i < again.steps.size(); ++i)
        EXPECT_EQ(again.steps[i].op, script.steps[i].op);
    EXPECT_EQ(again.match.threshold, script.match.threshold);
}

TEST(Script, ConfigKeys)
{
    auto s = parse_script("source A a.owl\nsource B b.owl\nconfig merged=M suffix-policy=always-suffix threshold=0.5\n");
    EXPECT_EQ(s.engine.merged_name, "M");
    EXPECT_EQ(s.engine.suffix_policy, SuffixPolicy::AlwaysSuffix);
    EXPECT_DOUBLE_EQ(s.match.threshold, 0.5);
}

TEST(Script, SyntaxErrorsCarryLineNumbers)
{
    for (const char* bad : {"source A\n", "config colour=red\n", "source A a.owl\nfrobnicate x=y\n",
                            "source A a.owl\nmerge-classes a=x@A\n", "source A a.owl\nshallow-copy class=x\n"}) {
        try {
            parse_script(bad);
            FAIL() << bad;
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::ScriptSyntax) << bad;
            EXPECT_NE(std::string(e.what()).find("line "), std::string::npos) << e.what();
        }
    }
}

TEST(Script, OperationLinesRoundTrip)
{
    for (const char* line : {
             "merge-classes a=author@A b=author@B name=writer",
             "merge-slots a=s@A b=t@B",
             "merge-instances a=i@A b=j@B confirm=true",
             "shallow-copy class=c@A",
             "deep-copy class=c@A",
             "copy-slot slot=s@A",
             "create-class name=Person supers=Agent,Thing",
             "add-superclass class=author@G super=Thing",
             "remove-superclass class=author@G super=Person@G",
             "rename kind=slot frame=s@G name=t",
             "remove kind=instance frame=i@G",
             "swap-names kind=class a=x@G b=y@G",
             "set-range slot=s@G datatype=NMTOKEN",
             "set-range slot=s@G classes=a,b",
             "set-cardinality slot=s@G min=0 max=*",
             "set-cardinality slot=s@G min=1 max=3",
             "set-preferred source=A",
             "set-preferred",
         })
        EXPECT_EQ(to_line(parse_operation(line)), line);
}

TEST(Replay, StepFailureNamesTheStep)
{
    auto text = xml::read_file(fixture("scripts/bibliography.merge")) +
                "merge-classes a=author@Ruby_bibliography b=author@Niagara_bib\n";
    auto script = parse_script(text, fixture("scripts"));
    try {
        replay(script);
        FAIL();
    } catch (const StepError& e) {
        EXPECT_EQ(e.index(), 14u);
        EXPECT_EQ(e.code(), ErrorCode::StepFailure);
    }
}

TEST(Replay, GoldenTwoSource)
{
    auto a = replay(load_script(fixture("scripts/bibliography.merge")));
    EXPECT_EQ(write_canonical(a.session().merged()), xml::read_file(fixture("golden/bibliography.canonical")));
}

TEST(Replay, GoldenThreeSource)
{
    auto a = replay(load_script(fixture("scripts/bibliography_sigmod.merge")));
    EXPECT_EQ(write_canonical(a.session().merged()), xml::read_file(fixture("golden/bibliography_sigmod.canonical")));
}

TEST(Replay, XmlSourcesAreLifted)
{
    auto script = parse_script("source Ruby_bibliography ../xml/ruby_bibliography.xml\n"
                               "source Niagara_bib ../xml/niagara_bib.xml\n" +
                                   [] {
                                       auto t = xml::read_file(fixture("scripts/bibliography.merge"));
                                       return t.substr(t.find("merge-classes"));
                                   }(),
                               fixture("scripts"));
    auto a = replay(script);
    EXPECT_EQ(write_canonical(a.session().merged()), xml::read_file(fixture("golden/bibliography.canonical")));
}

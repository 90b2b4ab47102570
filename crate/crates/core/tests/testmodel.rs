mod common;

use std::collections::BTreeSet;

use common::{load, method, project, FIXTURES};
use tesex::ingest::ProjectModel;
use tesex::testmodel::{analyze_tests, discover_tests, Exclusion, TestMethod, TestModelError, TestStyle};

fn find<'a>(tests: &'a [TestMethod], id: &str) -> &'a TestMethod {
    tests.iter().find(|t| t.id == id).unwrap_or_else(|| panic!("no test {id}"))
}

/// Labels of the resolved actions of each sub-scenario.
fn resolved_labels(model: &ProjectModel, t: &TestMethod) -> Vec<BTreeSet<String>> {
    let mm = model.method(t.method);
    t.sub_scenarios
        .iter()
        .map(|ss| ss.asserted.iter().map(|a| mm.actions[a.resolved_action].label()).collect())
        .collect()
}

#[test]
fn junit3_and_junit4_discovery() {
    let model = load("corpus");
    let tests = discover_tests(&model);
    let erase = find(&tests, "com.google.common.collect.ArrayTableTest#testEraseAll");
    assert_eq!(erase.style, TestStyle::JUnit3);
    let j4 = find(&tests, "org.apache.commons.mail.EmailJUnit4Test#addHeaderStoresValue");
    assert_eq!(j4.style, TestStyle::JUnit4);
    for not_test in [
        "org.apache.commons.mail.EmailJUnit4Test#notATest",
        "org.apache.commons.mail.EmailJUnit4Test#setUp",
        "com.google.common.collect.ArrayTableTest#create",
        "org.apache.commons.mail.EmailTest#setUp",
    ] {
        assert!(tests.iter().all(|t| t.id != not_test), "{not_test}");
    }
}

#[test]
fn junit3_signature_rules() {
    let (_d, model) = project(&[
        ("main/p/A.java", "package p; public class A { public void f() {} }"),
        (
            "test/p/ATest.java",
            "package p; public class ATest {
                public void testOk() { new A().f(); assertTrue(true); }
                private void testPrivate() { }
                public int testReturns() { return 1; }
                public void testParam(int x) { }
                public static void testStatic() { }
            }",
        ),
    ]);
    let ids: Vec<String> = discover_tests(&model).into_iter().map(|t| t.id).collect();
    assert_eq!(ids, vec!["p.ATest#testOk".to_string()]);
}

#[test]
fn negative_tests_are_excluded() {
    let model = load("corpus");
    let (tests, _) = analyze_tests(&model);
    for id in [
        "org.puremvc.ProxyTest#nullData",
        "org.apache.commons.mail.EmailJUnit4Test#addHeaderRejectsNullName",
        "org.apache.commons.mail.EmailTest#testSetSmtpPortRejectsZero",
    ] {
        assert_eq!(find(&tests, id).excluded, Some(Exclusion::NegativeBehavior), "{id}");
    }
    // a fail guard outside try is an oracle, not a negative test
    assert_eq!(find(&tests, "org.puremvc.ControllerTest#testRegisterAndExecuteCommand").excluded, None);
}

#[test]
fn inherited_fixture_and_nonstandard_assert() {
    let model = load("corpus");
    let (tests, _) = analyze_tests(&model);
    assert_eq!(
        find(&tests, "org.apache.commons.mail.HtmlEmailTest#testSetHostName").excluded,
        Some(Exclusion::InheritedFixture)
    );
    // external base class does not count as an inherited fixture
    assert_ne!(
        find(&tests, "org.apache.tools.ant.JUnitReportTest#testNoFrames").excluded,
        Some(Exclusion::InheritedFixture)
    );
    assert_eq!(find(&tests, "org.puremvc.ProxyTest#assertThatStyle").excluded, Some(Exclusion::NonStandardAssert));
}

#[test]
fn no_assertions_is_reported() {
    let (_d, model) = project(&[
        ("main/p/A.java", "package p; public class A { public void f() {} }"),
        ("test/p/ATest.java", "package p; public class ATest { public void testNothing() { new A().f(); } }"),
    ]);
    let (tests, errors) = analyze_tests(&model);
    assert_eq!(tests[0].excluded, Some(Exclusion::NonStandardAssert));
    assert!(matches!(&errors[..], [TestModelError::NoAssertions { test }] if test == "p.ATest#testNothing"));
}

#[test]
fn sub_scenarios_of_has_command() {
    let model = load("corpus");
    let (tests, _) = analyze_tests(&model);
    let t = find(&tests, "org.puremvc.ControllerTest#testHasCommand");
    let mm = model.method(t.method);
    assert_eq!(t.sub_scenarios.len(), 2);
    assert_eq!(t.sub_scenarios[0].action_statements, vec![mm.body[0].id, mm.body[1].id]);
    assert_eq!(t.sub_scenarios[0].assert_statements, vec![mm.body[2].id]);
    assert_eq!(t.sub_scenarios[1].action_statements, vec![mm.body[3].id]);
    assert_eq!(t.sub_scenarios[1].assert_statements, vec![mm.body[4].id]);
    assert!(t.trailing.is_empty());
    let labels = resolved_labels(&model, t);
    for l in &labels {
        assert_eq!(l, &BTreeSet::from(["IController.hasCommand".to_string()]));
    }
}

#[test]
fn fail_guard_closes_sub_scenario() {
    let model = load("corpus");
    let (tests, _) = analyze_tests(&model);
    let t = find(&tests, "org.puremvc.ControllerTest#testRegisterAndExecuteCommand");
    assert_eq!(t.sub_scenarios.len(), 2);
    let labels = resolved_labels(&model, t);
    assert_eq!(labels[0], BTreeSet::from(["IController.hasCommand".to_string()]));
    // `vo.result == 24` is a direct read of a project field
    assert_eq!(labels[1], BTreeSet::from(["ControllerTestVO.result".to_string()]));
}

#[test]
fn folding_headers_slices_and_resolves() {
    let model = load("corpus");
    let (tests, errors) = analyze_tests(&model);
    let t = find(&tests, "org.apache.commons.mail.EmailTest#testFoldingHeaders");
    assert!(errors.iter().all(|e| !matches!(e, TestModelError::UnresolvableAssertion { test, .. } if test == &t.id)));
    // greedy split: adjacent asserts group, so the run of asserts after
    // `values` and the one after `lines` are separate sub-scenarios
    assert_eq!(t.sub_scenarios.len(), 3);
    let sizes: Vec<(usize, usize)> =
        t.sub_scenarios.iter().map(|s| (s.action_statements.len(), s.assert_statements.len())).collect();
    assert_eq!(sizes, vec![(7, 2), (4, 1), (1, 2)]);
    let labels = resolved_labels(&model, t);
    assert!(labels[0].contains("Email.getHeaders"));
    assert_eq!(labels[1], BTreeSet::from(["Email.getMimeMessage".to_string()]));
    assert_eq!(labels[2], BTreeSet::from(["Email.getMimeMessage".to_string()]));
    // `values` is chased through `msg.getHeader` to `msg`
    let chased = t.sub_scenarios[1].asserted.iter().find(|a| !a.resolution_path.is_empty()).expect("helper chain");
    assert_eq!(chased.resolution_path.len(), 1);
}

#[test]
fn content_type_resolves_to_get_mime_message() {
    let model = load("corpus");
    let (tests, _) = analyze_tests(&model);
    let t = find(&tests, "org.apache.commons.mail.EmailTest#testDefaultCharsetAppliesToTextContent");
    assert_eq!(t.sub_scenarios.len(), 1);
    assert_eq!(resolved_labels(&model, t)[0], BTreeSet::from(["Email.getMimeMessage".to_string()]));
}

#[test]
fn nested_assert_in_loop_is_an_oracle() {
    let model = load("corpus");
    let (tests, _) = analyze_tests(&model);
    let t = find(&tests, "org.apache.commons.mail.EmailTest#testSetSubject");
    assert_eq!(t.sub_scenarios.len(), 1);
    assert_eq!(t.sub_scenarios[0].action_statements.len(), 1);
    assert_eq!(resolved_labels(&model, t)[0], BTreeSet::from(["Email.getSubject".to_string()]));
}

#[test]
fn trivially_true_assertion_is_unresolvable() {
    let (_d, model) = project(&[
        ("main/p/A.java", "package p; public class A { public void f() {} }"),
        (
            "test/p/ATest.java",
            "package p; public class ATest {
                public void testTrivial() {
                    A a = new A();
                    a.f();
                    assertTrue(true);
                }
            }",
        ),
    ]);
    let (tests, errors) = analyze_tests(&model);
    assert_eq!(tests[0].sub_scenarios.len(), 1);
    assert!(tests[0].sub_scenarios[0].asserted.is_empty());
    assert!(matches!(&errors[..], [TestModelError::UnresolvableAssertion { line: 5, .. }]));
}

#[test]
fn helper_chain_is_bounded() {
    // a long chain of plain copies still resolves; a cycle does not loop
    let mut body = String::from("A a = new A(); int v0 = a.get();\n");
    for i in 1..=10 {
        body.push_str(&format!("int v{i} = v{} + 1;\n", i - 1));
    }
    body.push_str("assertEquals(10, v10);\nint x = 0; int y = x; x = y; assertEquals(0, x);\n");
    let test = format!("package p; public class ATest {{ public void testChain() {{ {body} }} }}");
    let (_d, model) = project(&[
        ("main/p/A.java", "package p; public class A { int n; public int get() { return n; } }"),
        ("test/p/ATest.java", &test),
    ]);
    let (tests, errors) = analyze_tests(&model);
    let labels = resolved_labels(&model, &tests[0]);
    assert_eq!(labels[0], BTreeSet::from(["A.get".to_string()]));
    assert_eq!(tests[0].sub_scenarios[0].asserted[0].resolution_path.len(), 10);
    assert!(labels[1].is_empty());
    assert_eq!(errors.len(), 1);
}

#[test]
fn sub_scenarios_partition_top_level_statements() {
    for name in FIXTURES {
        let model = load(name);
        let (tests, _) = analyze_tests(&model);
        for t in tests.iter().filter(|t| !t.sub_scenarios.is_empty()) {
            let mm = model.method(t.method);
            let mut ids: Vec<usize> = t
                .sub_scenarios
                .iter()
                .flat_map(|s| s.action_statements.iter().chain(&s.assert_statements).copied())
                .chain(t.trailing.iter().copied())
                .collect();
            let sorted = {
                let mut s = ids.clone();
                s.sort_unstable();
                s
            };
            assert_eq!(ids, sorted, "{} in order", t.id);
            ids.dedup();
            let top: Vec<usize> = mm.body.iter().map(|s| s.id).collect();
            assert_eq!(ids, top, "{} covers body", t.id);
            for (i, s) in t.sub_scenarios.iter().enumerate() {
                assert_eq!(s.index, i);
                assert!(!s.assert_statements.is_empty());
            }
        }
    }
}

#[test]
fn resolved_actions_are_system_and_precede_assert() {
    for name in FIXTURES {
        let model = load(name);
        let (tests, _) = analyze_tests(&model);
        for t in &tests {
            let mm = model.method(t.method);
            for a in t.sub_scenarios.iter().flat_map(|s| &s.asserted) {
                assert!(mm.actions[a.resolved_action].callee.is_system(), "{}", t.id);
                let site = tesex::testmodel::statement(mm, a.origin_assert).unwrap();
                assert!(a.resolved_action <= *site.all_actions().last().unwrap(), "{}", t.id);
            }
        }
    }
    let _ = method;
}

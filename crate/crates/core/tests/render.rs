use dodeca::billiard::WedgeSystem;
use dodeca::dynamics::{find_periodic_component, DEFAULT_COMPONENT_CAP};
use dodeca::geometry::Point;
use dodeca::render::{render_svg, Scene};

fn scene() -> Scene {
    let w = WedgeSystem::new();
    let mut s = Scene::with_clip(Point::from_ints(-3, -3), Point::from_ints(5, 5));
    s.region("table", w.table.polygon.clone(), "table").region("wedge", w.wedge.clone(), "wedge");
    for k in 1..=4 {
        let c = find_periodic_component(&w, &w.o[k], DEFAULT_COMPONENT_CAP).unwrap();
        s.region(format!("w{k}"), c.region, "red");
    }
    s.point("o5", w.o[5].clone(), "point");
    s
}

#[test]
fn output_is_byte_stable() {
    let a = render_svg(&scene()).unwrap();
    let b = render_svg(&scene()).unwrap();
    assert_eq!(a, b);
    assert!(a.starts_with("<?xml"));
    assert!(a.ends_with("</svg>\n"));
    for id in ["table", "wedge", "w1", "w2", "w3", "w4", "o5"] {
        assert!(a.contains(&format!("<g id=\"{id}\"")), "{id}");
    }
}

#[test]
fn unbounded_wedge_is_clipped_to_the_viewport() {
    let svg = render_svg(&scene()).unwrap();
    assert!(svg.contains("viewBox=\"-3.400000000 -5.400000000 8.800000000 8.800000000\""));
}

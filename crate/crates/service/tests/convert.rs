use std::fs;

use cinebot_core::catalog::Item;
use cinebot_core::{Catalog, InformationNeed};
use cinebot_service::convert::{convert, MovieLensFiles};

#[test]
fn movielens_export_becomes_catalog() {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name);
    fs::write(
        p("movies.csv"),
        "movieId,title,genres\n\
         1,Toy Story (1995),Adventure|Animation|Children|Comedy\n\
         2,\"Matrix, The (1999)\",Action|Sci-Fi|Thriller\n\
         3,Untitled (2010),(no genres listed)\n\
         4,No Year Film,Drama\n\
         5,Unrated (2001),Drama\n",
    )
    .unwrap();
    fs::write(
        p("ratings.csv"),
        "userId,movieId,rating,timestamp\n1,1,4.0,0\n2,1,5.0,0\n1,2,5.0,0\n1,3,3.0,0\n1,4,3.0,0\n",
    )
    .unwrap();
    fs::write(p("tags.csv"), "userId,movieId,tag,timestamp\n1,2,Cyberpunk,0\n2,2,cyberpunk,0\n3,2,Keanu,0\n").unwrap();
    fs::write(p("links.csv"), "movieId,imdbId,tmdbId\n1,0114709,862\n2,0133093,603\n").unwrap();
    let files = MovieLensFiles {
        movies: p("movies.csv"),
        ratings: Some(p("ratings.csv")),
        tags: Some(p("tags.csv")),
        links: Some(p("links.csv")),
    };
    let mut out = Vec::new();
    let report = convert(&files, 1, &mut out).unwrap();
    assert_eq!((report.written, report.no_genres, report.no_year, report.no_rating), (2, 1, 1, 1));

    let items: Vec<Item> = String::from_utf8(out.clone())
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(items[0].title, "Toy Story");
    assert_eq!(items[0].rating, 9.0);
    assert_eq!(items[0].votes, 2);
    assert_eq!(items[0].item_url, "https://www.imdb.com/title/tt0114709/");
    assert_eq!(items[1].title, "The Matrix");
    assert_eq!(items[1].keywords, ["cyberpunk", "keanu"]);

    let (catalog, load) = Catalog::load(&out[..], None).unwrap();
    assert_eq!(load.dropped + load.malformed, 0);
    assert_eq!(catalog.count_items(&InformationNeed::new()), 2);
}
